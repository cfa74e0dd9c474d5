#include "qdil/qphase.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qdil/errors.hpp"

namespace qdil {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPhaseTol = 1e-12;

// Representative of x in (-pi, pi].
double wrap_angle(double x) {
  return x - kTwoPi * std::ceil((x - std::numbers::pi) / kTwoPi);
}

// Distance of x from the lattice 2*pi*Z.
double lattice_distance(double x) { return std::abs(std::remainder(x, kTwoPi)); }

void check_index(const PhaseMatrix& p, std::size_t i) {
  if (i >= p.size()) {
    std::ostringstream os;
    os << "phase index " << i << " out of range for n = " << p.size();
    fail(ErrorCode::IndexOutOfRange, os.str());
  }
}

}  // namespace

PhaseMatrix::PhaseMatrix(const RealMatrix& theta) {
  if (theta.rows() != theta.cols()) {
    fail(ErrorCode::DimensionMismatch, "phase matrix must be square");
  }
  const Eigen::Index n = theta.rows();
  theta_ = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(theta(i, j))) {
        fail(ErrorCode::InvalidInput, "phase matrix has non-finite entries");
      }
    }
    if (lattice_distance(theta(i, i)) > kPhaseTol) {
      fail(ErrorCode::InvalidInput, "phase matrix diagonal must vanish (q(i,i) = 1)");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (lattice_distance(theta(i, j) + theta(j, i)) > kPhaseTol) {
        std::ostringstream os;
        os << "phase matrix is not antisymmetric at (" << i << ", " << j << ")";
        fail(ErrorCode::InvalidInput, os.str());
      }
      const double w = wrap_angle(theta(i, j));
      theta_(i, j) = w;
      theta_(j, i) = -w;
    }
  }
}

PhaseMatrix PhaseMatrix::zero(std::size_t n) {
  return PhaseMatrix(RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

PhaseMatrix PhaseMatrix::uniform(std::size_t n, double angle) {
  const auto m = static_cast<Eigen::Index>(n);
  RealMatrix t = RealMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      t(i, j) = angle;
      t(j, i) = -angle;
    }
  }
  return PhaseMatrix(t);
}

double PhaseMatrix::theta(std::size_t i, std::size_t j) const {
  check_index(*this, i);
  check_index(*this, j);
  return theta_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

PhaseMatrix PhaseMatrix::restricted(std::span<const std::size_t> idx) const {
  const auto m = static_cast<Eigen::Index>(idx.size());
  RealMatrix t(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) t(a, b) = theta(idx[a], idx[b]);
  }
  return PhaseMatrix(t);
}

Complex q_value(const PhaseMatrix& p, std::size_t i, std::size_t j) {
  if (i > j) return std::conj(q_value(p, j, i));
  return std::polar(1.0, p.theta(i, j));
}

Complex q_half(const PhaseMatrix& p, std::size_t i, std::size_t j) {
  if (i > j) return std::conj(q_half(p, j, i));
  return std::polar(1.0, 0.5 * p.theta(i, j));
}

Complex monomial_phase(const PhaseMatrix& p, std::size_t m, std::span<const int> k, int power) {
  if (k.size() != p.size()) {
    fail(ErrorCode::DimensionMismatch, "multi-index length differs from the number of variables");
  }
  double angle = 0.0;
  for (std::size_t t = 0; t < k.size(); ++t) angle += p.theta(m, t) * k[t];
  return std::polar(1.0, 0.5 * power * angle);
}

Complex monomial_phase(const PhaseMatrix& p, std::size_t m, std::span<const int> k,
                       std::span<const std::size_t> vars, int power) {
  if (k.size() != vars.size()) {
    fail(ErrorCode::DimensionMismatch, "multi-index length differs from the variable map");
  }
  double angle = 0.0;
  for (std::size_t t = 0; t < k.size(); ++t) angle += p.theta(m, vars[t]) * k[t];
  return std::polar(1.0, 0.5 * power * angle);
}

Complex cross_phase(const PhaseMatrix& p, std::span<const int> k) {
  if (k.size() != p.size()) {
    fail(ErrorCode::DimensionMismatch, "multi-index length differs from the number of variables");
  }
  double angle = 0.0;
  for (std::size_t s = 0; s < k.size(); ++s) {
    for (std::size_t t = s + 1; t < k.size(); ++t) {
      angle += p.theta(s, t) * static_cast<double>(k[s]) * static_cast<double>(k[t]);
    }
  }
  return std::polar(1.0, 0.5 * angle);
}

Complex cross_phase(const PhaseMatrix& p, std::span<const int> k,
                    std::span<const std::size_t> vars) {
  if (k.size() != vars.size()) {
    fail(ErrorCode::DimensionMismatch, "multi-index length differs from the variable map");
  }
  double angle = 0.0;
  for (std::size_t s = 0; s < k.size(); ++s) {
    for (std::size_t t = s + 1; t < k.size(); ++t) {
      angle += p.theta(vars[s], vars[t]) * static_cast<double>(k[s]) * static_cast<double>(k[t]);
    }
  }
  return std::polar(1.0, 0.5 * angle);
}

QTuple::QTuple(std::vector<ComplexMatrix> ops, PhaseMatrix phases)
    : ops_(std::move(ops)), phases_(std::move(phases)) {
  if (ops_.empty()) fail(ErrorCode::InvalidInput, "a tuple needs at least one operator");
  if (phases_.size() != ops_.size()) {
    std::ostringstream os;
    os << "phase matrix is " << phases_.size() << "x" << phases_.size() << " but the tuple has "
       << ops_.size() << " operators";
    fail(ErrorCode::DimensionMismatch, os.str());
  }
  const Eigen::Index d = ops_.front().rows();
  for (const auto& op : ops_) {
    if (op.rows() != d || op.cols() != d) {
      fail(ErrorCode::DimensionMismatch, "tuple operators must be square of one common size");
    }
    if (!all_finite(op)) fail(ErrorCode::InvalidInput, "tuple operator has non-finite entries");
  }
}

void QPair::check_shapes() const {
  const Eigen::Index d = t1.rows();
  for (const ComplexMatrix* m : {&t1, &t2, &q}) {
    if (m->rows() != d || m->cols() != d) {
      fail(ErrorCode::DimensionMismatch, "T1, T2 and Q must be square of one common size");
    }
    if (!all_finite(*m)) fail(ErrorCode::InvalidInput, "pair has non-finite entries");
  }
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::Left: return "left";
    case Variant::Middle: return "middle";
    case Variant::Right: return "right";
  }
  return "left";
}

Variant parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "left") return Variant::Left;
  if (lower == "middle") return Variant::Middle;
  if (lower == "right") return Variant::Right;
  fail(ErrorCode::InvalidInput, "unknown relation variant '" + std::string(name) + "'");
}

RelationReport verify_q_tuple(const QTuple& t, const ToleranceConfig& cfg) {
  RelationReport rep;
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    rep.max_norm_excess = std::max(rep.max_norm_excess, op_norm(t.op(i)) - 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const ComplexMatrix r =
          t.op(i) * t.op(j) - q_value(t.phases(), i, j) * (t.op(j) * t.op(i));
      rep.max_relation_residual = std::max(rep.max_relation_residual, op_norm(r));
    }
  }
  rep.passed = rep.max_relation_residual <= cfg.verify_tol && rep.max_norm_excess <= cfg.verify_tol;
  return rep;
}

RelationReport verify_doubly_q(const QTuple& t, const ToleranceConfig& cfg) {
  RelationReport rep = verify_q_tuple(t, cfg);
  const std::size_t n = t.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const ComplexMatrix r = t.op(i) * t.op(j).adjoint() -
                              std::conj(q_value(t.phases(), i, j)) * (t.op(j).adjoint() * t.op(i));
      rep.max_star_residual = std::max(rep.max_star_residual, op_norm(r));
    }
  }
  rep.passed = rep.passed && rep.max_star_residual <= cfg.verify_tol;
  return rep;
}

ComplexMatrix pair_relation_residual(const QPair& p) {
  switch (p.variant) {
    case Variant::Left: return p.t1 * p.t2 - p.q * p.t2 * p.t1;
    case Variant::Middle: return p.t1 * p.t2 - p.t2 * p.q * p.t1;
    case Variant::Right: return p.t1 * p.t2 - p.t2 * p.t1 * p.q;
  }
  return p.t1;
}

RelationReport verify_q_pair(const QPair& p, const ToleranceConfig& cfg) {
  p.check_shapes();
  RelationReport rep;
  rep.max_relation_residual = op_norm(pair_relation_residual(p));
  rep.max_norm_excess = std::max({0.0, op_norm(p.t1) - 1.0, op_norm(p.t2) - 1.0});
  rep.unitarity_defect = op_norm(p.q.adjoint() * p.q - identity(p.dim()));
  rep.passed = rep.max_relation_residual <= cfg.verify_tol &&
               rep.max_norm_excess <= cfg.verify_tol && rep.unitarity_defect <= cfg.verify_tol;
  return rep;
}

}  // namespace qdil
