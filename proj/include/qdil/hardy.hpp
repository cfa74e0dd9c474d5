#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qdil/linalg.hpp"
#include "qdil/qphase.hpp"

namespace qdil {

/// Polynomials of per-variable degree <= deg_cap in n variables with
/// coefficients in C^e_dim.
///
/// Monomials are ordered by total degree, then lexicographically with the
/// first exponent most significant; the basis vector z^k (x) e_t sits at
/// index monomial_index(k) * e_dim + t. n = 0 gives the single constant
/// monomial.
class TruncatedHardy {
 public:
  static constexpr std::string_view kBasisOrder = "graded-lex, coeff-innermost";

  TruncatedHardy(std::size_t n, Eigen::Index e_dim, int deg_cap);

  std::size_t n_vars() const { return n_; }
  Eigen::Index e_dim() const { return e_dim_; }
  int deg_cap() const { return deg_; }
  std::size_t monomial_count() const { return monomials_.size(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(monomials_.size()) * e_dim_; }

  const MultiIndex& monomial(std::size_t idx) const { return monomials_.at(idx); }
  /// Throws IndexOutOfRange if k is outside the cap.
  std::size_t monomial_index(std::span<const int> k) const;
  bool contains(std::span<const int> k) const;
  Eigen::Index basis_index(std::size_t mono, Eigen::Index t) const {
    return static_cast<Eigen::Index>(mono) * e_dim_ + t;
  }

  /// Monomial indices with max_i k_i <= max_degree.
  std::vector<std::size_t> monomials_up_to(int max_degree) const;
  /// Basis indices of those monomials (all coefficient slots).
  std::vector<Eigen::Index> basis_up_to(int max_degree) const;

 private:
  std::size_t radix_position(std::span<const int> k) const;

  std::size_t n_;
  Eigen::Index e_dim_;
  int deg_;
  std::vector<MultiIndex> monomials_;
  std::vector<std::size_t> lookup_;  // mixed-radix position -> monomial index
};

/// Weighted monomial operator z^k (x) a -> phase[k] z^(k + e_v) (x) C a, where
/// v is shift_var (or no shift when shift_var < 0) and C = coeff (identity
/// when empty). Images above the cap are dropped. Acts on row-blocks of
/// matrices laid out in the basis order of the space it was built for.
struct MonomialOp {
  Eigen::Index e_dim = 0;
  std::vector<long> target;      ///< target monomial index or -1
  std::vector<Complex> phases;   ///< one per source monomial
  ComplexMatrix coeff;           ///< e_dim x e_dim, empty for identity

  Eigen::Index dim() const { return static_cast<Eigen::Index>(target.size()) * e_dim; }
  ComplexMatrix apply(const ComplexMatrix& x) const;
  ComplexMatrix apply_adjoint(const ComplexMatrix& x) const;
  ComplexMatrix dense() const;
};

/// M_{z_m}.
MonomialOp shift_op(const TruncatedHardy& sp, std::size_t m);
/// R_{[q]_m}^power, with variable t of sp carrying phase index vars[t] and
/// m a phase index.
MonomialOp rotation_op(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m, int power,
                       std::span<const std::size_t> vars);
/// M_{z_m} R_{[q]_{vars[m]}} with phases taken over vars.
MonomialOp rotational_shift_op(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m,
                               std::span<const std::size_t> vars);
/// (I (x) U) R_{[q]_j}^2 for a phase index j outside vars.
MonomialOp twisted_unitary_op(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t j,
                              const ComplexMatrix& u, std::span<const std::size_t> vars);

/// Identity variable map 0..n-1.
std::vector<std::size_t> all_vars(std::size_t n);

ComplexMatrix shift_matrix(const TruncatedHardy& sp, std::size_t m);
/// Diagonal rotation with phase monomial_phase(p, m, k)^power; p.size() == n.
ComplexMatrix rotation_matrix(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m,
                              int power = 1);
ComplexMatrix rotational_shift(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m);

/// Identity columns for the given basis indices.
ComplexMatrix basis_columns(Eigen::Index dim, const std::vector<Eigen::Index>& idx);

struct RotationalReport {
  double q_commutation = 0.0;   ///< (i) on degrees <= d-2
  double adjoint_formula = 0.0; ///< (ii) entrywise, whole space
  double isometry = 0.0;        ///< (iii) V*V - I on degrees <= d-2
  double doubly = 0.0;          ///< (iv) on degrees <= d-2
  std::vector<double> adjoint_power_norms;  ///< |(V_m*)^p| for p = 1..d+1, max over m
  bool nilpotent = true;        ///< (V_m*)^(d+1) == 0 exactly for every m
  bool passed = true;
};

RotationalReport verify_rotational_properties(const TruncatedHardy& sp, const PhaseMatrix& p,
                                              const ToleranceConfig& cfg = {});

}  // namespace qdil
