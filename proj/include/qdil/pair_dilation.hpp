#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qdil/linalg.hpp"
#include "qdil/qphase.hpp"

namespace qdil {

/// H + G^N with G = H^4, laid out as 1 + 4N slots of size h_dim. Slot 0 is H;
/// slot s >= 1 is offset (s-1) % 4 of G-block (s-1) / 4.
struct TruncatedPairSpace {
  Eigen::Index h_dim = 0;
  std::size_t n_blocks = 0;

  std::size_t slot_count() const { return 1 + 4 * n_blocks; }
  Eigen::Index dim() const { return h_dim * static_cast<Eigen::Index>(slot_count()); }
  Eigen::Index slot_offset(std::size_t s) const { return static_cast<Eigen::Index>(s) * h_dim; }
  Eigen::Index block_offset(std::size_t j) const { return slot_offset(1 + 4 * j); }
  /// Slots whose images under words of length <= 2 never reach the cap.
  std::size_t interior_slots() const { return 4 * n_blocks >= 8 ? 4 * n_blocks - 8 : 0; }
};

struct GapDiagnostics {
  double gram_residual = 0.0;     ///< |A*A - B*B|
  double map_residual = 0.0;      ///< |G A - B|
  double unitarity_defect = 0.0;  ///< |G*G - I|
  Eigen::Index rank_a = 0;
  Eigen::Index rank_b = 0;
};

struct PairDilation {
  TruncatedPairSpace space;
  ComplexMatrix v1;
  ComplexMatrix v2;
  ComplexMatrix q_tilde;
  ComplexMatrix gap;  ///< 4h x 4h
  Variant variant = Variant::Left;
  GapDiagnostics gap_diagnostics;
};

/// T on slot 0, D_T on slot 0 -> 1, and slot k -> k + 2 multiplied by Q^k
/// (twist) or the identity; images past the last slot are dropped.
ComplexMatrix build_W(const ComplexMatrix& t, const ComplexMatrix& q, bool twist,
                      const TruncatedPairSpace& space, const ToleranceConfig& cfg = {});

/// R = Q+Q+Q+Q and P = I+Q+Q^2+Q^3 on H^4.
std::pair<ComplexMatrix, ComplexMatrix> build_R_P(const ComplexMatrix& q);

/// The column maps A, B : H -> H^4 that the gap unitary must match.
std::pair<ComplexMatrix, ComplexMatrix> gap_columns(const QPair& pair,
                                                    const ToleranceConfig& cfg = {});

ComplexMatrix build_gap_unitary(const QPair& pair, const ToleranceConfig& cfg = {});

/// Block-diagonal unitaries: identity on slot 0, G R^{-3j} (first) and
/// G R^j P (second) on block j.
std::pair<ComplexMatrix, ComplexMatrix> build_correctors(const ComplexMatrix& gap,
                                                         const ComplexMatrix& r,
                                                         const ComplexMatrix& p,
                                                         const TruncatedPairSpace& space);

PairDilation assemble_dilation(const QPair& pair, std::size_t k_max,
                               const ToleranceConfig& cfg = {});

struct DilationResidual {
  int k1 = 0;
  int k2 = 0;
  double residual = 0.0;
};

struct PairDilationReport {
  std::vector<DilationResidual> table;  ///< k1 + k2 <= k_max
  double max_dilation_residual = 0.0;
  double relation_residual = 0.0;       ///< on interior vectors
  double isometry_defect_v1 = 0.0;
  double isometry_defect_v2 = 0.0;
  double qtilde_h_residual = 0.0;       ///< |Q~ restricted to H - Q|
  double qtilde_unitarity_defect = 0.0;
  bool qtilde_block_structure = true;   ///< exact zero pattern of the declared block form
  double coextension_residual = 0.0;    ///< |P_H V_i* restricted to H - T_i*|
  std::size_t max_support_slot = 0;     ///< last slot reached by the dilation words
  bool truncation_exact = true;
  GapDiagnostics gap;
  bool passed = true;
};

PairDilationReport verify_pair_dilation(const PairDilation& d, const QPair& pair,
                                        std::size_t k_max, const ToleranceConfig& cfg = {});

}  // namespace qdil
