#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "qdil/linalg.hpp"

namespace qdil {

/// Nonnegative exponents, one per variable.
using MultiIndex = std::vector<int>;

/// Antisymmetric angle matrix theta with q(i,j) = exp(i theta(i,j)).
///
/// Construction validates diag = 0 and antisymmetry modulo 2*pi, then wraps
/// the strict upper triangle into (-pi, pi] and writes the lower triangle as
/// its exact negative. Indices are 0-based.
class PhaseMatrix {
 public:
  PhaseMatrix() = default;
  explicit PhaseMatrix(const RealMatrix& theta);

  static PhaseMatrix zero(std::size_t n);
  /// theta(i,j) = angle for every i < j.
  static PhaseMatrix uniform(std::size_t n, double angle);

  std::size_t size() const { return static_cast<std::size_t>(theta_.rows()); }
  double theta(std::size_t i, std::size_t j) const;
  const RealMatrix& matrix() const { return theta_; }

  /// Phases of the sub-tuple indexed by idx (in the given order).
  PhaseMatrix restricted(std::span<const std::size_t> idx) const;

 private:
  RealMatrix theta_;
};

Complex q_value(const PhaseMatrix& p, std::size_t i, std::size_t j);
Complex q_half(const PhaseMatrix& p, std::size_t i, std::size_t j);

/// exp((i/2) * power * sum_t theta(m, t) k_t).
Complex monomial_phase(const PhaseMatrix& p, std::size_t m, std::span<const int> k,
                       int power = 1);
/// Same with k_t attached to variable vars[t] of p.
Complex monomial_phase(const PhaseMatrix& p, std::size_t m, std::span<const int> k,
                       std::span<const std::size_t> vars, int power = 1);

/// exp((i/2) * sum_{s<t} theta(s,t) k_s k_t).
Complex cross_phase(const PhaseMatrix& p, std::span<const int> k);
Complex cross_phase(const PhaseMatrix& p, std::span<const int> k,
                    std::span<const std::size_t> vars);

/// n-tuple of square matrices of one common size with its phase matrix.
/// Only shapes are checked here; verify_q_tuple checks the relations.
class QTuple {
 public:
  QTuple() = default;
  QTuple(std::vector<ComplexMatrix> ops, PhaseMatrix phases);

  std::size_t size() const { return ops_.size(); }
  Eigen::Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }
  const ComplexMatrix& op(std::size_t i) const { return ops_.at(i); }
  const std::vector<ComplexMatrix>& ops() const { return ops_; }
  const PhaseMatrix& phases() const { return phases_; }

 private:
  std::vector<ComplexMatrix> ops_;
  PhaseMatrix phases_;
};

struct QPair {
  ComplexMatrix t1;
  ComplexMatrix t2;
  ComplexMatrix q;
  Variant variant = Variant::Left;

  Eigen::Index dim() const { return t1.rows(); }
  /// Throws DimensionMismatch unless all three are square of one size.
  void check_shapes() const;
};

std::string_view to_string(Variant v) noexcept;
/// Accepts "left", "middle", "right" (any case). Throws InvalidInput.
Variant parse_variant(std::string_view name);

struct RelationReport {
  double max_relation_residual = 0.0;
  double max_norm_excess = 0.0;    ///< max(0, |T_i| - 1)
  double max_star_residual = 0.0;  ///< doubly-q relations (verify_doubly_q only)
  double unitarity_defect = 0.0;   ///< |Q*Q - I| (verify_q_pair only)
  bool passed = true;
};

RelationReport verify_q_tuple(const QTuple& t, const ToleranceConfig& cfg = {});
RelationReport verify_doubly_q(const QTuple& t, const ToleranceConfig& cfg = {});
RelationReport verify_q_pair(const QPair& p, const ToleranceConfig& cfg = {});

/// T1 T2 minus the right-hand side of the declared relation.
ComplexMatrix pair_relation_residual(const QPair& p);

}  // namespace qdil
