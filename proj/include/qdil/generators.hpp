#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qdil/linalg.hpp"
#include "qdil/qphase.hpp"

namespace qdil {

using Rng = std::mt19937_64;

/// Instance recipe. Fields not used by a kind are ignored.
///
/// kinds:
///   clock_shift            n = 2, dim = clock size, scale
///   compressed_rotational  n, e_dim, deg, scale, theta (random when absent)
///   sylvester_qpair        dim, variant, q_mode or q, scale
///   scaled_random          n, weyl, dim (diagonal size), scale
///   mixed_brehmer          n, weyl, deg, unitary (indices kept unitary), scale
struct GeneratorSpec {
  std::string kind = "clock_shift";
  std::uint64_t seed = 0;
  std::size_t n = 2;
  Eigen::Index dim = 2;
  Eigen::Index e_dim = 1;
  int deg = 2;
  int weyl = 2;
  double scale = 1.0;
  Variant variant = Variant::Left;
  /// "identity", "scalar" (angle q_angle), "diagonal" or "haar".
  std::string q_mode = "haar";
  double q_angle = 0.0;
  std::optional<ComplexMatrix> q;
  std::optional<RealMatrix> theta;
  std::vector<std::size_t> unitary;

  /// Throws InvalidInput on out-of-range parameters.
  void validate() const;
};

using Instance = std::variant<QTuple, QPair>;

ComplexMatrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
/// Gaussian matrix rescaled to operator norm `norm`.
ComplexMatrix random_contraction(Rng& rng, Eigen::Index dim, double norm);
/// Haar-distributed unitary (QR of a Gaussian with the phase of R's diagonal removed).
ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim);
ComplexMatrix random_diagonal_unitary(Rng& rng, Eigen::Index dim);
PhaseMatrix random_phases(Rng& rng, std::size_t n);

/// Clock diag(1, w, ..., w^{d-1}) and cyclic shift e_j -> e_{j+1}, w = exp(2 pi i / d).
ComplexMatrix clock_matrix(Eigen::Index d);
ComplexMatrix shift_cycle_matrix(Eigen::Index d);

QTuple gen_clock_shift(Eigen::Index d, double scale);
/// Throws GenerationFailed if the Szego defect is not positive.
QTuple gen_compressed_rotational(std::size_t n, Eigen::Index e_dim, int deg, double scale,
                                 const PhaseMatrix& p, const ToleranceConfig& cfg = {});
/// Throws GenerationFailed after 16 attempts without a nontrivial solution.
QPair gen_sylvester_qpair(Eigen::Index h_dim, Variant variant, const ComplexMatrix& q,
                          std::uint64_t seed, double scale, const ToleranceConfig& cfg = {});
/// Doubly q-commuting tuple U (W_i (x) Delta_i) U* scaled by `scale`, with W_i
/// clock-shift words on C^weyl and Delta_i random diagonal contractions on C^dim.
QTuple gen_scaled_random(std::size_t n, int weyl, Eigen::Index dim, double scale,
                         std::uint64_t seed);
/// W_i (x) M_i with M_i = I for i in `unitary` and a commuting truncated shift
/// of cap deg otherwise, conjugated by a random unitary.
QTuple gen_mixed_brehmer(std::size_t n, int weyl, int deg, const std::vector<std::size_t>& unitary,
                         double scale, std::uint64_t seed);

/// (X, N) with N normal (a unitarily rotated diagonal whose first two
/// eigenvalues differ by the factor q) and X a random element of the
/// solution space of X N = q N X.
std::pair<ComplexMatrix, ComplexMatrix> gen_fuglede_putnam_sample(Rng& rng, Complex q,
                                                                  Eigen::Index dim,
                                                                  const ToleranceConfig& cfg = {});

/// Pair (T1, T2) with Q = q(1,2) I, Left variant.
QPair as_qpair(const QTuple& t);

/// The unitary Q requested by spec (q_mode or explicit q).
ComplexMatrix spec_q(const GeneratorSpec& spec);

/// Build and self-verify an instance; throws GenerationFailed if the
/// instance misses its own relations by more than 1e-12.
Instance generate(const GeneratorSpec& spec, const ToleranceConfig& cfg = {});

}  // namespace qdil
