#include "qdil/tuple_dilation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qdil/errors.hpp"

namespace qdil {

namespace {

constexpr std::size_t kMaxTupleSize = 20;

void check_tuple_size(std::size_t n) {
  if (n > kMaxTupleSize) {
    std::ostringstream os;
    os << "tuples of more than " << kMaxTupleSize << " operators are not supported";
    fail(ErrorCode::InvalidInput, os.str());
  }
}

// Rows of x whose monomial has every exponent <= max_degree.
ComplexMatrix restrict_rows(const ComplexMatrix& x, const TruncatedHardy& sp, int max_degree) {
  const auto rows = sp.basis_up_to(max_degree);
  ComplexMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
  return out;
}

// Operator norm of the column-stacked matrix [R_1; R_2; ...] from its Gram sum.
double stacked_norm(const ComplexMatrix& gram) {
  if (gram.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (gram + gram.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

std::vector<MonomialOp> dilating_ops(const TruncatedHardy& sp, const PhaseMatrix& p,
                                     const IndexSet& g, const QTuple& s) {
  const auto vars = g.members();
  std::vector<MonomialOp> ops;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto pos = std::find(vars.begin(), vars.end(), j);
    if (pos != vars.end()) {
      ops.push_back(rotational_shift_op(sp, p, static_cast<std::size_t>(pos - vars.begin()), vars));
    } else {
      ops.push_back(twisted_unitary_op(sp, p, j, s.op(j), vars));
    }
  }
  return ops;
}

}  // namespace

IndexSet::IndexSet(std::size_t n, std::uint32_t mask) : n_(n), mask_(mask) {
  check_tuple_size(n);
  if (n < 32 && (mask >> n) != 0) fail(ErrorCode::IndexOutOfRange, "subset mask exceeds n");
}

IndexSet IndexSet::full(std::size_t n) {
  check_tuple_size(n);
  return IndexSet(n, n == 0 ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1));
}

IndexSet IndexSet::from_members(std::size_t n, const std::vector<std::size_t>& members) {
  std::uint32_t mask = 0;
  for (std::size_t m : members) {
    if (m >= n) fail(ErrorCode::IndexOutOfRange, "subset member out of range");
    mask |= 1u << m;
  }
  return IndexSet(n, mask);
}

std::size_t IndexSet::count() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> IndexSet::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

IndexSet IndexSet::complement() const { return IndexSet(n_, full(n_).mask() & ~mask_); }

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t m : members()) {
    if (!first) os << ',';
    os << m + 1;
    first = false;
  }
  os << '}';
  return os.str();
}

ComplexMatrix ordered_product(const QTuple& t, const IndexSet& f) {
  ComplexMatrix out = identity(t.dim());
  for (std::size_t m : f.members()) out = out * t.op(m);
  return out;
}

ComplexMatrix ordered_product_adjoint(const QTuple& t, const IndexSet& f) {
  ComplexMatrix out = identity(t.dim());
  for (std::size_t m : f.members()) out = t.op(m).adjoint() * out;
  return out;
}

ComplexMatrix power_word(const QTuple& t, std::span<const int> k, bool adjoint) {
  if (k.size() != t.size()) fail(ErrorCode::DimensionMismatch, "multi-index length differs from n");
  ComplexMatrix out = identity(t.dim());
  for (std::size_t m = 0; m < k.size(); ++m) {
    if (k[m] < 0) fail(ErrorCode::InvalidInput, "negative exponent");
    for (int e = 0; e < k[m]; ++e) {
      if (adjoint) {
        out = t.op(m).adjoint() * out;
      } else {
        out = out * t.op(m);
      }
    }
  }
  return out;
}

ComplexMatrix subset_defect(const QTuple& t, const IndexSet& g) {
  ComplexMatrix out = ComplexMatrix::Zero(t.dim(), t.dim());
  // Enumerate every F within g, including the empty set.
  std::uint32_t f = g.mask();
  while (true) {
    const IndexSet fs(t.size(), f);
    const ComplexMatrix tf = ordered_product(t, fs);
    const double sign = (fs.count() % 2 == 0) ? 1.0 : -1.0;
    out += sign * (tf * tf.adjoint());
    if (f == 0) break;
    f = (f - 1) & g.mask();
  }
  return out;
}

ComplexMatrix szego_defect(const QTuple& t) { return subset_defect(t, IndexSet::full(t.size())); }

BrehmerReport brehmer_check(const QTuple& t, const ToleranceConfig& cfg) {
  check_tuple_size(t.size());
  BrehmerReport rep;
  const std::uint32_t total = std::uint32_t{1} << t.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    const IndexSet g(t.size(), mask);
    const PsdCertificate cert = psd_check(subset_defect(t, g), cfg);
    rep.subsets.push_back({g, cert.min_eigenvalue, cert.is_psd});
    if (!cert.is_psd && !rep.first_failure) rep.first_failure = g;
  }
  rep.passed = !rep.first_failure.has_value();
  return rep;
}

FugledePutnamReport fuglede_putnam_check(const ComplexMatrix& x, const ComplexMatrix& n, Complex q,
                                         const ToleranceConfig& cfg) {
  if (n.rows() != n.cols() || x.rows() != n.rows() || x.cols() != n.rows()) {
    fail(ErrorCode::DimensionMismatch, "fuglede_putnam_check: X and N must be square of one size");
  }
  FugledePutnamReport rep;
  rep.normality_residual = op_norm(n * n.adjoint() - n.adjoint() * n);
  rep.hypothesis_residual = op_norm(x * n - q * n * x);
  if (rep.normality_residual > cfg.verify_tol) {
    fail(ErrorCode::RelationViolated, "fuglede_putnam_check: N is not normal");
  }
  if (rep.hypothesis_residual > cfg.verify_tol) {
    fail(ErrorCode::RelationViolated, "fuglede_putnam_check: X N != q N X");
  }
  rep.conclusion_residual = op_norm(x * n.adjoint() - std::conj(q) * n.adjoint() * x);
  rep.passed = rep.conclusion_residual <= 10.0 * cfg.verify_tol;
  return rep;
}

HardyMap dilation_map_pi(const QTuple& t, const IndexSet& g, const ComplexMatrix& defect,
                         int deg_cap) {
  const Eigen::Index h = t.dim();
  if (defect.rows() != h || defect.cols() != h) {
    fail(ErrorCode::DimensionMismatch, "defect root must act on the tuple's space");
  }
  if (g.universe() != t.size()) fail(ErrorCode::DimensionMismatch, "subset universe differs from n");
  HardyMap out{TruncatedHardy(g.count(), h, deg_cap), g.members(), {}};
  const TruncatedHardy& sp = out.space;
  const std::size_t count = sp.monomial_count();
  out.matrix.resize(sp.dim(), h);

  std::vector<ComplexMatrix> words(count);
  words[0] = identity(h);
  for (std::size_t idx = 0; idx < count; ++idx) {
    const MultiIndex& k = sp.monomial(idx);
    if (idx > 0) {
      // T^{*k} = T_t* T^{*(k - e_t)} for the last variable t with k_t > 0.
      std::size_t last = k.size();
      while (k[--last] == 0) {
      }
      MultiIndex prev = k;
      --prev[last];
      words[idx] = t.op(out.vars[last]).adjoint() * words[sp.monomial_index(prev)];
    }
    out.matrix.middleRows(static_cast<Eigen::Index>(idx) * h, h) =
        cross_phase(t.phases(), k, out.vars) * (defect * words[idx]);
  }
  return out;
}

std::vector<MonomialOp> model_shifts(const HardyMap& pi, const PhaseMatrix& p) {
  std::vector<MonomialOp> ops;
  for (std::size_t a = 0; a < pi.vars.size(); ++a) {
    ops.push_back(rotational_shift_op(pi.space, p, a, pi.vars));
  }
  return ops;
}

IntertwiningReport verify_pi_intertwining(const HardyMap& pi, const QTuple& t,
                                          const ToleranceConfig& cfg) {
  IntertwiningReport rep;
  const auto shifts = model_shifts(pi, t.phases());
  const int d = pi.space.deg_cap();
  for (std::size_t a = 0; a < pi.vars.size(); ++a) {
    const ComplexMatrix diff =
        pi.matrix * t.op(pi.vars[a]).adjoint() - shifts[a].apply_adjoint(pi.matrix);
    const double res = op_norm(restrict_rows(diff, pi.space, d - 1));
    rep.residuals.push_back(res);
    rep.max_residual = std::max(rep.max_residual, res);
  }
  rep.passed = rep.max_residual <= cfg.verify_tol;
  return rep;
}

NormLimitReport norm_limit_check(const QTuple& t, const ComplexVector& h, int l_max,
                                 const ToleranceConfig& cfg) {
  if (h.size() != t.dim()) fail(ErrorCode::DimensionMismatch, "vector size differs from the tuple");
  if (l_max < 1) fail(ErrorCode::InvalidInput, "l_max must be at least 1");
  check_tuple_size(t.size());
  NormLimitReport rep;
  rep.h_norm_sq = h.squaredNorm();
  const std::uint32_t total = std::uint32_t{1} << t.size();
  for (int l = 1; l <= l_max; ++l) {
    double s = 0.0;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      const IndexSet f(t.size(), mask);
      MultiIndex k(t.size(), 0);
      for (std::size_t m : f.members()) k[m] = l;
      const double sign = (f.count() % 2 == 0) ? 1.0 : -1.0;
      s += sign * (power_word(t, k, true) * h).squaredNorm();
    }
    rep.partial_sums.push_back(s);
  }
  const ComplexMatrix d = hermitian_sqrt(szego_defect(t), cfg);
  const HardyMap pi = dilation_map_pi(t, IndexSet::full(t.size()), d, l_max - 1);
  rep.pi_norm_sq = (pi.matrix * h).squaredNorm();
  rep.gap = std::abs(rep.partial_sums.back() - rep.pi_norm_sq);
  rep.passed = rep.gap <= cfg.verify_tol * std::max(1.0, rep.h_norm_sq);
  return rep;
}

PurityReport purity_check(const QTuple& t, const ToleranceConfig& cfg) {
  constexpr int kSquarings = 16;
  PurityReport rep;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double rho = 0.0;
    if (t.dim() > 0) {
      Eigen::ComplexEigenSolver<ComplexMatrix> es(t.op(i), false);
      rho = es.eigenvalues().cwiseAbs().maxCoeff();
    }
    std::vector<double> norms;
    ComplexMatrix a = t.op(i).adjoint();
    bool vanished = false;
    for (int s = 0; s <= kSquarings; ++s) {
      const double nrm = op_norm(a);
      norms.push_back(nrm);
      if (nrm <= cfg.sot_tol) {
        vanished = true;
        break;
      }
      a = a * a;
    }
    const bool pure = vanished || rho <= 1.0 - cfg.verify_tol;
    rep.spectral_radius.push_back(rho);
    rep.power_norms.push_back(std::move(norms));
    rep.pure_each.push_back(pure);
    rep.pure = rep.pure && pure;
  }
  return rep;
}

PureDilation pure_dilation(const QTuple& t, int deg_cap, const ToleranceConfig& cfg) {
  cfg.validate();
  check_tuple_size(t.size());
  PureDilation out;
  PureDilationReport& rep = out.report;
  rep.purity = purity_check(t, cfg);
  if (!rep.purity.pure) {
    std::ostringstream os;
    os << "tuple is not pure (spectral radii";
    for (double r : rep.purity.spectral_radius) os << ' ' << r;
    os << ")";
    fail(ErrorCode::NotPure, os.str());
  }
  const ComplexMatrix defect = szego_defect(t);
  const PsdCertificate cert = psd_check(defect, cfg);
  rep.szego_min_eigenvalue = cert.min_eigenvalue;
  if (!cert.is_psd) {
    std::ostringstream os;
    os << "Szego defect is not positive (min eigenvalue " << cert.min_eigenvalue << ")";
    fail(ErrorCode::NotSzego, os.str());
  }
  const ComplexMatrix d = hermitian_sqrt(defect, cfg);
  const IndexSet all = IndexSet::full(t.size());

  int cap = deg_cap > 0 ? deg_cap : static_cast<int>(t.size()) + 4;
  while (true) {
    rep.deg_tried.push_back(cap);
    out.pi = dilation_map_pi(t, all, d, cap);
    rep.isometry_defect =
        op_norm(out.pi.matrix.adjoint() * out.pi.matrix - identity(t.dim()));
    if (rep.isometry_defect <= cfg.verify_tol) break;
    if (cap >= kMaxDegreeCap) {
      std::ostringstream os;
      os << "isometry defect " << rep.isometry_defect << " still above tolerance at cap " << cap;
      fail(ErrorCode::TruncationNotConverged, os.str());
    }
    cap = std::min(2 * cap, kMaxDegreeCap);
  }
  rep.deg_used = cap;
  out.shifts = model_shifts(out.pi, t.phases());
  rep.intertwining = verify_pi_intertwining(out.pi, t, cfg);
  rep.passed = rep.isometry_defect <= cfg.verify_tol && rep.intertwining.passed;
  return out;
}

SubsetData subset_pipeline(const QTuple& t, const IndexSet& g, int deg_cap,
                           const ToleranceConfig& cfg) {
  if (g.universe() != t.size()) fail(ErrorCode::DimensionMismatch, "subset universe differs from n");
  const std::size_t n = t.size();
  const Eigen::Index h = t.dim();
  SubsetData out;
  out.g = g;

  const IndexSet gc = g.complement();
  if (gc.empty()) {
    out.x_sq = identity(h);
  } else {
    const SotLimit lim = sot_limit_power(ordered_product(t, gc), cfg);
    out.x_sq = lim.limit;
    out.sot_iterations = lim.iterations;
  }
  const ComplexMatrix x = hermitian_sqrt(out.x_sq, cfg);

  std::vector<ComplexMatrix> s_ops;
  ComplexMatrix basis;
  RealVector values;
  for (std::size_t j = 0; j < n; ++j) {
    DouglasFactor f = douglas_solve(x, t.op(j), cfg);
    out.douglas_residual = std::max(out.douglas_residual, f.residual);
    if (j == 0) {
      basis = f.range_basis;
      values = f.range_values;
    }
    s_ops.push_back(std::move(f.s));
  }
  out.h_g_dim = values.size();
  out.x_coords = values.cast<Complex>().asDiagonal() * basis.adjoint();
  out.s = QTuple(std::move(s_ops), t.phases());
  const Eigen::Index r = out.h_g_dim;

  for (std::size_t j : gc.members()) {
    const ComplexMatrix& sj = out.s.op(j);
    out.coisometry_residual = std::max(out.coisometry_residual, op_norm(sj * sj.adjoint() - identity(r)));
    out.unitarity_residual = std::max(out.unitarity_residual, op_norm(sj.adjoint() * sj - identity(r)));
  }

  const PsdCertificate cert = psd_check(subset_defect(out.s, g), cfg);
  out.defect_min_eigenvalue = cert.min_eigenvalue;
  if (!cert.is_psd) {
    std::ostringstream os;
    os << "compressed defect over G = " << g.to_string() << " is not positive (min eigenvalue "
       << cert.min_eigenvalue << ")";
    fail(ErrorCode::SubsetPositivityFailure, os.str());
  }
  const ComplexMatrix dg = hermitian_sqrt(subset_defect(out.s, g), cfg);
  HardyMap tilde = dilation_map_pi(out.s, g, dg, deg_cap);
  out.pi = HardyMap{tilde.space, tilde.vars, tilde.matrix * out.x_coords};
  out.pi_norm = op_norm(out.pi.matrix);
  out.v = dilating_ops(out.pi.space, t.phases(), g, out.s);

  for (std::size_t j = 0; j < n; ++j) {
    ComplexMatrix diff = out.pi.matrix * t.op(j).adjoint() - out.v[j].apply_adjoint(out.pi.matrix);
    if (g.contains(j)) diff = restrict_rows(diff, out.pi.space, deg_cap - 1);
    const double res = op_norm(diff);
    out.intertwining.residuals.push_back(res);
    out.intertwining.max_residual = std::max(out.intertwining.max_residual, res);
  }
  out.intertwining.passed = out.intertwining.max_residual <= cfg.verify_tol;
  return out;
}

std::pair<double, double> check_model_relations(const SubsetData& data, const PhaseMatrix& p,
                                                int cap) {
  const TruncatedHardy sp(data.g.count(), data.h_g_dim, cap);
  const auto ops = dilating_ops(sp, p, data.g, data.s);
  const ComplexMatrix x = basis_columns(sp.dim(), sp.basis_up_to(cap - 2));
  double comm = 0.0, star = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const ComplexMatrix vi_x = ops[i].apply(x);
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (i == j) continue;
      const Complex q = q_value(p, i, j);
      comm = std::max(comm, op_norm(ops[i].apply(ops[j].apply(x)) - q * ops[j].apply(vi_x)));
      star = std::max(star, op_norm(ops[i].apply(ops[j].apply_adjoint(x)) -
                                    std::conj(q) * ops[j].apply_adjoint(vi_x)));
    }
  }
  return {comm, star};
}

BrehmerDilation brehmer_dilation(const QTuple& t, int deg_cap, const ToleranceConfig& cfg) {
  cfg.validate();
  check_tuple_size(t.size());
  const std::size_t n = t.size();
  const Eigen::Index h = t.dim();
  BrehmerDilation out;
  BrehmerDilationReport& rep = out.report;
  rep.positivity = brehmer_check(t, cfg);
  if (!rep.positivity.passed) {
    const IndexSet bad = *rep.positivity.first_failure;
    double eig = 0.0;
    for (const auto& s : rep.positivity.subsets) {
      if (s.subset.mask() == bad.mask()) eig = s.min_eigenvalue;
    }
    std::ostringstream os;
    os << "Brehmer positivity fails at G = " << bad.to_string() << " (min eigenvalue " << eig << ")";
    fail(ErrorCode::SubsetPositivityFailure, os.str());
  }

  const std::uint32_t total = std::uint32_t{1} << n;
  int cap = deg_cap > 0 ? deg_cap : static_cast<int>(n) + 4;
  while (true) {
    rep.deg_tried.push_back(cap);
    out.subsets.clear();
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      out.subsets.push_back(subset_pipeline(t, IndexSet(n, mask), cap, cfg));
    }
    ComplexMatrix gram = ComplexMatrix::Zero(h, h);
    for (const auto& s : out.subsets) gram += s.pi.matrix.adjoint() * s.pi.matrix;
    rep.isometry_defect = op_norm(gram - identity(h));
    if (rep.isometry_defect <= cfg.verify_tol) break;
    if (cap >= kMaxDegreeCap) {
      std::ostringstream os;
      os << "stacked map has isometry defect " << rep.isometry_defect << " at cap " << cap;
      fail(ErrorCode::IsometryDefect, os.str());
    }
    cap = std::min(2 * cap, kMaxDegreeCap);
  }
  rep.deg_used = cap;

  Eigen::Index rows = 0;
  for (const auto& s : out.subsets) rows += s.pi.matrix.rows();
  out.pi.resize(rows, h);
  Eigen::Index at = 0;
  for (const auto& s : out.subsets) {
    out.pi.middleRows(at, s.pi.matrix.rows()) = s.pi.matrix;
    at += s.pi.matrix.rows();
  }

  // Stacked intertwining residual per j from the blockwise residuals.
  rep.intertwining.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    ComplexMatrix gram = ComplexMatrix::Zero(h, h);
    for (const auto& s : out.subsets) {
      ComplexMatrix diff = s.pi.matrix * t.op(j).adjoint() - s.v[j].apply_adjoint(s.pi.matrix);
      if (s.g.contains(j)) diff = restrict_rows(diff, s.pi.space, cap - 1);
      gram += diff.adjoint() * diff;
    }
    rep.intertwining[j] = stacked_norm(gram);
  }

  const int check_cap = std::clamp(cap, 2, 5);
  double max_coisometry = 0.0;
  for (const auto& s : out.subsets) {
    const auto [comm, star] = check_model_relations(s, t.phases(), check_cap);
    rep.q_commutation_residual = std::max(rep.q_commutation_residual, comm);
    rep.doubly_residual = std::max(rep.doubly_residual, star);
    max_coisometry = std::max({max_coisometry, s.coisometry_residual, s.unitarity_residual});
    if (s.g.mask() != IndexSet::full(n).mask()) {
      rep.max_proper_pi_norm = std::max(rep.max_proper_pi_norm, s.pi_norm);
    }
  }

  const double tol = cfg.verify_tol;
  rep.passed = rep.isometry_defect <= tol && rep.q_commutation_residual <= tol &&
               rep.doubly_residual <= tol && max_coisometry <= tol &&
               std::all_of(rep.intertwining.begin(), rep.intertwining.end(),
                           [&](double r) { return r <= tol; });
  return out;
}

}  // namespace qdil
