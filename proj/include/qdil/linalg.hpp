#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qdil {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical thresholds shared by every construction and verifier.
struct ToleranceConfig {
  double eig_clamp = 1e-10;   ///< eigenvalues in [-eig_clamp*scale, eig_clamp*scale] are treated as 0
  double psd_tol = 1e-9;      ///< PSD certificate threshold (relative to max(1, |M|))
  double rank_tol = 1e-10;    ///< singular values <= rank_tol*sigma_max count as zero
  double verify_tol = 1e-8;   ///< default residual bound for all identities
  double sot_tol = 1e-12;     ///< Frobenius step size that stops the SOT iteration
  std::size_t sot_max_iter = 100000;

  /// Throws InvalidInput unless every tolerance is strictly positive.
  void validate() const;
};

/// The three Q-commutation relations for a pair (T1, T2):
/// Left T1T2 = Q T2 T1, Middle T1T2 = T2 Q T1, Right T1T2 = T2 T1 Q.
enum class Variant { Left, Middle, Right };

ComplexMatrix identity(Eigen::Index n);

/// Largest singular value. Zero for empty matrices.
double op_norm(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

/// Number of singular values above rank_tol * sigma_max (descending input).
Eigen::Index numerical_rank(const RealVector& singular_values, double rank_tol);

/// Closest isometry W (Stiefel point) to M in the polar sense, M = W |M|.
/// M must have at least as many rows as columns.
ComplexMatrix polar_isometry(const ComplexMatrix& m);

/// Hermitian PSD square root; eigenvalues within eig_clamp*scale of zero
/// are set to zero.
/// Throws NotHermitian or NotPSD.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& m, const ToleranceConfig& cfg = {});

struct PsdCertificate {
  double min_eigenvalue = 0.0;
  bool is_psd = true;
};

/// Smallest eigenvalue of the Hermitian part and the PSD verdict.
/// Throws NotHermitian when the input is not Hermitian up to verify_tol.
PsdCertificate psd_check(const ComplexMatrix& m, const ToleranceConfig& cfg = {});

/// Unitary G (d x d) with G A = B, given A, B : C^h -> C^d with A*A = B*B.
///
/// The isometry ran A -> ran B is fixed by the data; the complement of ran A is
/// paired with the complement of ran B position by position, both taken from
/// full SVDs (singular value descending, then column index). Throws
/// GramMismatch when |A*A - B*B| exceeds verify_tol or the ranks differ.
ComplexMatrix unitary_completion(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const ToleranceConfig& cfg = {});

/// Contraction S on ran X solving S* X h = X T* h (Douglas factorization).
struct DouglasFactor {
  ComplexMatrix s;            ///< r x r, in the coordinates of range_basis
  ComplexMatrix range_basis;  ///< h x r orthonormal basis of ran X
  RealVector range_values;    ///< eigenvalues of X on range_basis (all > 0)
  double residual = 0.0;      ///< |S* X|_ran - X T*|_ran|
};

DouglasFactor douglas_solve(const ComplexMatrix& x, const ComplexMatrix& t,
                            const ToleranceConfig& cfg = {});

struct SotLimit {
  ComplexMatrix limit;  ///< X^2 = SOT-lim A^m A*^m
  std::size_t iterations = 0;
  double residual = 0.0;  ///< last Frobenius step
};

/// Limit of A^m A*^m via M <- A M A*, M_0 = I. After the step size first
/// drops below sot_tol the same number of steps is run again so that decaying
/// components sit far below rank_tol. Throws NoConvergence.
SotLimit sot_limit_power(const ComplexMatrix& a, const ToleranceConfig& cfg = {});

/// Frobenius-orthonormal basis of {X : X T2 = rhs(X)} with rhs = Q T2 X,
/// T2 Q X or T2 X Q for Left, Middle, Right respectively.
std::vector<ComplexMatrix> sylvester_nullspace(const ComplexMatrix& t2, const ComplexMatrix& q,
                                               Variant variant, const ToleranceConfig& cfg = {});

/// Residual X T2 - rhs(X) of the relation solved by sylvester_nullspace.
ComplexMatrix sylvester_residual(const ComplexMatrix& x, const ComplexMatrix& t2,
                                 const ComplexMatrix& q, Variant variant);

}  // namespace qdil
