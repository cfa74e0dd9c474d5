#include "qdil/pair_dilation.hpp"

#include <algorithm>
#include <sstream>

#include "qdil/errors.hpp"

namespace qdil {

namespace {

ComplexMatrix defect(const ComplexMatrix& t, const ToleranceConfig& cfg) {
  return hermitian_sqrt(identity(t.cols()) - t.adjoint() * t, cfg);
}

ComplexMatrix block_diagonal(const ComplexMatrix& b, std::size_t copies) {
  const Eigen::Index h = b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(h * static_cast<Eigen::Index>(copies),
                                          h * static_cast<Eigen::Index>(copies));
  for (std::size_t c = 0; c < copies; ++c) {
    const auto o = static_cast<Eigen::Index>(c) * h;
    out.block(o, o, h, h) = b;
  }
  return out;
}

// Last slot carrying a nonzero entry in any column.
std::size_t support_slot(const ComplexMatrix& x, Eigen::Index h) {
  for (Eigen::Index r = x.rows(); r-- > 0;) {
    if (x.row(r).cwiseAbs().maxCoeff() != 0.0) return static_cast<std::size_t>(r / h);
  }
  return 0;
}

void check_space(const TruncatedPairSpace& space, Eigen::Index h) {
  if (space.h_dim != h) fail(ErrorCode::DimensionMismatch, "operator size differs from h_dim");
  if (space.n_blocks < 2) fail(ErrorCode::InvalidInput, "pair space needs at least two G-blocks");
}

}  // namespace

ComplexMatrix build_W(const ComplexMatrix& t, const ComplexMatrix& q, bool twist,
                      const TruncatedPairSpace& space, const ToleranceConfig& cfg) {
  const Eigen::Index h = t.rows();
  if (t.cols() != h || q.rows() != h || q.cols() != h) {
    fail(ErrorCode::DimensionMismatch, "build_W: T and Q must be square of one size");
  }
  check_space(space, h);
  ComplexMatrix w = ComplexMatrix::Zero(space.dim(), space.dim());
  w.block(0, 0, h, h) = t;
  w.block(space.slot_offset(1), 0, h, h) = defect(t, cfg);
  ComplexMatrix q_power = identity(h);
  const std::size_t last = space.slot_count() - 1;
  for (std::size_t k = 1; k + 2 <= last; ++k) {
    if (twist) q_power = q * q_power;
    w.block(space.slot_offset(k + 2), space.slot_offset(k), h, h) = q_power;
  }
  return w;
}

std::pair<ComplexMatrix, ComplexMatrix> build_R_P(const ComplexMatrix& q) {
  const Eigen::Index h = q.rows();
  if (q.cols() != h) fail(ErrorCode::DimensionMismatch, "build_R_P: Q must be square");
  ComplexMatrix r = block_diagonal(q, 4);
  ComplexMatrix p = ComplexMatrix::Zero(4 * h, 4 * h);
  ComplexMatrix q_power = identity(h);
  for (Eigen::Index s = 0; s < 4; ++s) {
    p.block(s * h, s * h, h, h) = q_power;
    q_power = q * q_power;
  }
  return {r, p};
}

std::pair<ComplexMatrix, ComplexMatrix> gap_columns(const QPair& pair, const ToleranceConfig& cfg) {
  pair.check_shapes();
  const Eigen::Index h = pair.dim();
  const ComplexMatrix d1 = defect(pair.t1, cfg);
  const ComplexMatrix d2 = defect(pair.t2, cfg);
  ComplexMatrix a = ComplexMatrix::Zero(4 * h, h);
  ComplexMatrix b = ComplexMatrix::Zero(4 * h, h);
  a.topRows(h) = d1 * pair.t2;
  a.middleRows(2 * h, h) = pair.q * d2;
  switch (pair.variant) {
    case Variant::Left:
      b.topRows(h) = pair.q * d2 * pair.t1;
      b.middleRows(2 * h, h) = pair.q * d1;
      break;
    case Variant::Middle:
      b.topRows(h) = d2 * pair.q * pair.t1;
      b.middleRows(2 * h, h) = pair.q * d1;
      break;
    case Variant::Right:
      // Q moves to the right of T1 and D_{T1}; with the Left columns the Gram
      // identity fails unless Q commutes with T1 and T2.
      b.topRows(h) = d2 * pair.t1 * pair.q;
      b.middleRows(2 * h, h) = d1 * pair.q;
      break;
  }
  return {a, b};
}

ComplexMatrix build_gap_unitary(const QPair& pair, const ToleranceConfig& cfg) {
  const auto [a, b] = gap_columns(pair, cfg);
  return unitary_completion(a, b, cfg);
}

std::pair<ComplexMatrix, ComplexMatrix> build_correctors(const ComplexMatrix& gap,
                                                         const ComplexMatrix& r,
                                                         const ComplexMatrix& p,
                                                         const TruncatedPairSpace& space) {
  const Eigen::Index g = 4 * space.h_dim;
  if (gap.rows() != g || gap.cols() != g || r.rows() != g || p.rows() != g) {
    fail(ErrorCode::DimensionMismatch, "build_correctors: blocks must be 4h x 4h");
  }
  ComplexMatrix first = identity(space.dim());
  ComplexMatrix second = identity(space.dim());
  const ComplexMatrix r_inv3 = r.adjoint() * r.adjoint() * r.adjoint();
  ComplexMatrix back = identity(g);
  ComplexMatrix fwd = identity(g);
  for (std::size_t j = 0; j < space.n_blocks; ++j) {
    const Eigen::Index o = space.block_offset(j);
    first.block(o, o, g, g) = gap * back;
    second.block(o, o, g, g) = gap * fwd * p;
    back = back * r_inv3;
    fwd = fwd * r;
  }
  return {first, second};
}

PairDilation assemble_dilation(const QPair& pair, std::size_t k_max, const ToleranceConfig& cfg) {
  cfg.validate();
  if (k_max < 1) fail(ErrorCode::InvalidInput, "k_max must be at least 1");
  const RelationReport rel = verify_q_pair(pair, cfg);
  if (!rel.passed) {
    std::ostringstream os;
    os << "pair does not satisfy its declared " << to_string(pair.variant)
       << " relation (residual " << rel.max_relation_residual << ", norm excess "
       << rel.max_norm_excess << ", |Q*Q - I| " << rel.unitarity_defect << ")";
    fail(ErrorCode::RelationViolated, os.str());
  }

  PairDilation out;
  out.variant = pair.variant;
  out.space = TruncatedPairSpace{pair.dim(), k_max + 2};
  const Eigen::Index h = pair.dim();

  const auto [a, b] = gap_columns(pair, cfg);
  out.gap = unitary_completion(a, b, cfg);
  {
    Eigen::JacobiSVD<ComplexMatrix> sa(a), sb(b);
    out.gap_diagnostics.rank_a = numerical_rank(sa.singularValues(), cfg.rank_tol);
    out.gap_diagnostics.rank_b = numerical_rank(sb.singularValues(), cfg.rank_tol);
  }
  out.gap_diagnostics.gram_residual = op_norm(a.adjoint() * a - b.adjoint() * b);
  out.gap_diagnostics.map_residual = op_norm(out.gap * a - b);
  out.gap_diagnostics.unitarity_defect = op_norm(out.gap.adjoint() * out.gap - identity(4 * h));

  const auto [r, p] = build_R_P(pair.q);
  const auto [g1, g2] = build_correctors(out.gap, r, p, out.space);
  const ComplexMatrix w1 = build_W(pair.t1, pair.q, true, out.space, cfg);
  const ComplexMatrix w2 = build_W(pair.t2, pair.q, false, out.space, cfg);
  out.v1 = g1 * w1;
  out.v2 = w2 * g2.adjoint();

  if (pair.variant == Variant::Middle) {
    out.q_tilde = ComplexMatrix::Zero(out.space.dim(), out.space.dim());
    out.q_tilde.topLeftCorner(h, h) = pair.q;
    const ComplexMatrix tail = out.gap * r * out.gap.adjoint();
    for (std::size_t j = 0; j < out.space.n_blocks; ++j) {
      const Eigen::Index o = out.space.block_offset(j);
      out.q_tilde.block(o, o, 4 * h, 4 * h) = tail;
    }
  } else {
    out.q_tilde = block_diagonal(pair.q, out.space.slot_count());
  }
  return out;
}

PairDilationReport verify_pair_dilation(const PairDilation& d, const QPair& pair, std::size_t k_max,
                                        const ToleranceConfig& cfg) {
  pair.check_shapes();
  const TruncatedPairSpace& sp = d.space;
  const Eigen::Index h = sp.h_dim;
  check_space(sp, pair.dim());
  const Eigen::Index dim = sp.dim();
  const std::size_t last = sp.slot_count() - 1;

  PairDilationReport rep;
  rep.gap = d.gap_diagnostics;

  // Dilation table. Every vector fed into V1 or V2 must stay at least one
  // G-block away from the cap for the truncation to be inactive.
  const ComplexMatrix e0 = ComplexMatrix::Identity(dim, h);
  std::vector<ComplexMatrix> t1_pow{identity(h)}, t2_pow{identity(h)};
  for (std::size_t k = 1; k <= k_max; ++k) {
    t1_pow.push_back(pair.t1 * t1_pow.back());
    t2_pow.push_back(pair.t2 * t2_pow.back());
  }
  std::size_t fed_support = 0;
  ComplexMatrix y = e0;
  for (std::size_t k2 = 0; k2 <= k_max; ++k2) {
    ComplexMatrix z = y;
    for (std::size_t k1 = 0; k1 + k2 <= k_max; ++k1) {
      const double res = op_norm(t1_pow[k1] * t2_pow[k2] - z.topRows(h));
      rep.table.push_back({static_cast<int>(k1), static_cast<int>(k2), res});
      rep.max_dilation_residual = std::max(rep.max_dilation_residual, res);
      const std::size_t s = support_slot(z, h);
      rep.max_support_slot = std::max(rep.max_support_slot, s);
      if (k1 + k2 < k_max) {
        fed_support = std::max(fed_support, s);
        z = d.v1 * z;
      }
    }
    if (k2 < k_max) {
      fed_support = std::max(fed_support, support_slot(y, h));
      y = d.v2 * y;
    }
  }
  rep.truncation_exact = fed_support + 4 <= last;

  // Interior vectors: words of length two never reach the cap.
  const Eigen::Index interior = h * static_cast<Eigen::Index>(sp.interior_slots());
  const ComplexMatrix x = ComplexMatrix::Identity(dim, interior);
  const ComplexMatrix v1x = d.v1 * x, v2x = d.v2 * x;
  ComplexMatrix rel;
  switch (d.variant) {
    case Variant::Left: rel = d.v1 * v2x - d.q_tilde * (d.v2 * v1x); break;
    case Variant::Middle: rel = d.v1 * v2x - d.v2 * (d.q_tilde * v1x); break;
    case Variant::Right: rel = d.v1 * v2x - d.v2 * (d.v1 * (d.q_tilde * x)); break;
  }
  rep.relation_residual = op_norm(rel);
  rep.isometry_defect_v1 = op_norm(d.v1.adjoint() * v1x - x);
  rep.isometry_defect_v2 = op_norm(d.v2.adjoint() * v2x - x);

  rep.qtilde_h_residual = op_norm(d.q_tilde.topLeftCorner(h, h) - pair.q);
  rep.qtilde_unitarity_defect = op_norm(d.q_tilde.adjoint() * d.q_tilde - identity(dim));
  if (d.variant == Variant::Middle) {
    // Slot 0 decoupled from the blocks and no coupling between blocks.
    ComplexMatrix off = d.q_tilde;
    off.topLeftCorner(h, h).setZero();
    for (std::size_t j = 0; j < sp.n_blocks; ++j) {
      const Eigen::Index o = sp.block_offset(j);
      off.block(o, o, 4 * h, 4 * h).setZero();
    }
    rep.qtilde_block_structure = off.cwiseAbs().maxCoeff() == 0.0;
  } else {
    const ComplexMatrix diff = d.q_tilde - block_diagonal(pair.q, sp.slot_count());
    rep.qtilde_block_structure = diff.cwiseAbs().maxCoeff() == 0.0;
  }

  rep.coextension_residual =
      std::max(op_norm((d.v1.adjoint() * e0).topRows(h) - pair.t1.adjoint()),
               op_norm((d.v2.adjoint() * e0).topRows(h) - pair.t2.adjoint()));

  const double tol = cfg.verify_tol;
  rep.passed = rep.max_dilation_residual <= tol && rep.relation_residual <= tol &&
               rep.isometry_defect_v1 <= tol && rep.isometry_defect_v2 <= tol &&
               rep.qtilde_h_residual <= tol && rep.qtilde_unitarity_defect <= tol &&
               rep.qtilde_block_structure && rep.coextension_residual <= tol &&
               rep.truncation_exact && rep.gap.map_residual <= tol &&
               rep.gap.unitarity_defect <= tol && rep.gap.rank_a == rep.gap.rank_b;
  return rep;
}

}  // namespace qdil
