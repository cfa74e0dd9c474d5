#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdil/hardy.hpp"
#include "qdil/linalg.hpp"
#include "qdil/qphase.hpp"

namespace qdil {

/// Subset of {0..n-1} as a bitmask; members() is increasing.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::size_t n, std::uint32_t mask);
  static IndexSet full(std::size_t n);
  static IndexSet from_members(std::size_t n, const std::vector<std::size_t>& members);

  std::size_t universe() const { return n_; }
  std::uint32_t mask() const { return mask_; }
  std::size_t count() const;
  bool contains(std::size_t i) const { return i < n_ && ((mask_ >> i) & 1u) != 0; }
  std::vector<std::size_t> members() const;
  IndexSet complement() const;
  bool empty() const { return mask_ == 0; }
  /// 1-based, e.g. "{1,3}".
  std::string to_string() const;

 private:
  std::size_t n_ = 0;
  std::uint32_t mask_ = 0;
};

/// T_F = T_{f_1} ... T_{f_r} in increasing index order; T_empty = I.
ComplexMatrix ordered_product(const QTuple& t, const IndexSet& f);
/// T_F* = T_{f_r}* ... T_{f_1}*.
ComplexMatrix ordered_product_adjoint(const QTuple& t, const IndexSet& f);

/// T^k = T_1^{k_1} ... T_n^{k_n}, or T^{*k} = T_n*^{k_n} ... T_1*^{k_1}.
ComplexMatrix power_word(const QTuple& t, std::span<const int> k, bool adjoint);

/// sum over F subset of G of (-1)^|F| T_F T_F*.
ComplexMatrix subset_defect(const QTuple& t, const IndexSet& g);
ComplexMatrix szego_defect(const QTuple& t);

struct SubsetPositivity {
  IndexSet subset;
  double min_eigenvalue = 0.0;
  bool psd = true;
};

struct BrehmerReport {
  std::vector<SubsetPositivity> subsets;  ///< binary-counter order
  std::optional<IndexSet> first_failure;
  bool passed = true;
};

BrehmerReport brehmer_check(const QTuple& t, const ToleranceConfig& cfg = {});

struct FugledePutnamReport {
  double normality_residual = 0.0;   ///< |N N* - N* N|
  double hypothesis_residual = 0.0;  ///< |X N - q N X|
  double conclusion_residual = 0.0;  ///< |X N* - conj(q) N* X|
  bool passed = true;
};

/// Throws RelationViolated when N is not normal or X N != q N X within
/// verify_tol; passes when the starred relation holds within 10 verify_tol.
FugledePutnamReport fuglede_putnam_check(const ComplexMatrix& x, const ComplexMatrix& n,
                                         Complex q, const ToleranceConfig& cfg = {});

/// Matrix of a map H -> truncated Hardy space over the variables vars (phase
/// indices into the tuple).
struct HardyMap {
  TruncatedHardy space{0, 0, 0};
  std::vector<std::size_t> vars;
  ComplexMatrix matrix;
};

/// Coefficient block at k is cross_phase(k) D T(G)^{*k}, k over the members of
/// g. The coefficient space has dimension defect.rows().
HardyMap dilation_map_pi(const QTuple& t, const IndexSet& g, const ComplexMatrix& defect, int deg_cap);

/// Rotational shifts of the model over pi.vars.
std::vector<MonomialOp> model_shifts(const HardyMap& pi, const PhaseMatrix& p);

struct IntertwiningReport {
  std::vector<double> residuals;  ///< one per variable of the map
  double max_residual = 0.0;
  bool passed = true;
};

/// |Pi T_m* - V_m* Pi| restricted to rows of degree <= d-1, for each variable.
IntertwiningReport verify_pi_intertwining(const HardyMap& pi, const QTuple& t,
                                          const ToleranceConfig& cfg = {});

struct NormLimitReport {
  std::vector<double> partial_sums;  ///< s_1 .. s_lmax
  double pi_norm_sq = 0.0;           ///< |Pi h|^2 at cap l_max - 1
  double h_norm_sq = 0.0;
  double gap = 0.0;                  ///< |s_lmax - pi_norm_sq|
  bool passed = true;
};

/// s_l = sum_F (-1)^|F| |T^{*(l 1_F)} h|^2 against |Pi h|^2 at matched cap.
NormLimitReport norm_limit_check(const QTuple& t, const ComplexVector& h, int l_max,
                                 const ToleranceConfig& cfg = {});

struct PurityReport {
  std::vector<double> spectral_radius;          ///< per operator
  std::vector<std::vector<double>> power_norms; ///< |T_i^{*m}| for m = 1, 2, 4, ...
  std::vector<bool> pure_each;
  bool pure = true;
};

PurityReport purity_check(const QTuple& t, const ToleranceConfig& cfg = {});

struct PureDilationReport {
  PurityReport purity;
  double szego_min_eigenvalue = 0.0;
  double isometry_defect = 0.0;  ///< |Pi*Pi - I|
  IntertwiningReport intertwining;
  int deg_used = 0;
  std::vector<int> deg_tried;
  bool passed = true;
};

struct PureDilation {
  HardyMap pi;
  std::vector<MonomialOp> shifts;
  PureDilationReport report;
};

constexpr int kMaxDegreeCap = 64;

/// Throws NotPure, NotSzego or TruncationNotConverged. deg_cap <= 0 starts
/// the adaptive search at n + 4.
PureDilation pure_dilation(const QTuple& t, int deg_cap = 0, const ToleranceConfig& cfg = {});

struct SubsetData {
  IndexSet g;
  ComplexMatrix x_sq;          ///< SOT limit of T_{G^c}^m T_{G^c}^{*m}
  std::size_t sot_iterations = 0;
  ComplexMatrix x_coords;      ///< X as a map H -> ran X in range-basis coordinates
  Eigen::Index h_g_dim = 0;    ///< rank of X
  QTuple s;                    ///< compressed tuple on ran X (empty when rank 0)
  double coisometry_residual = 0.0;  ///< max over j outside G of |S_j S_j* - I|
  double unitarity_residual = 0.0;   ///< max over j outside G of |S_j* S_j - I|
  double douglas_residual = 0.0;
  double defect_min_eigenvalue = 0.0;
  HardyMap pi;                 ///< Pi_G = Pi~_G X
  std::vector<MonomialOp> v;   ///< V_{G,j} for j = 0..n-1
  double pi_norm = 0.0;
  IntertwiningReport intertwining;  ///< per j over all n operators
};

SubsetData subset_pipeline(const QTuple& t, const IndexSet& g, int deg_cap,
                           const ToleranceConfig& cfg = {});

struct BrehmerDilationReport {
  BrehmerReport positivity;
  double isometry_defect = 0.0;
  std::vector<double> intertwining;  ///< per j, stacked over G
  double doubly_residual = 0.0;      ///< blockwise doubly q-commutation of V
  double q_commutation_residual = 0.0;
  double max_proper_pi_norm = 0.0;   ///< max |Pi_G| over G != full set
  int deg_used = 0;
  std::vector<int> deg_tried;
  bool passed = true;
};

struct BrehmerDilation {
  std::vector<SubsetData> subsets;  ///< binary-counter order of the masks
  ComplexMatrix pi;                 ///< stacked
  BrehmerDilationReport report;
};

/// Throws SubsetPositivityFailure naming the first failing subset, or
/// IsometryDefect when the cap limit is reached.
BrehmerDilation brehmer_dilation(const QTuple& t, int deg_cap = 0, const ToleranceConfig& cfg = {});

/// Blockwise check of the dilating tuple on basis vectors of degree <= cap-2,
/// built on a separate cap so the check stays small. Returns
/// {q-commutation residual, doubly residual}.
std::pair<double, double> check_model_relations(const SubsetData& data, const PhaseMatrix& p,
                                                int cap);

}  // namespace qdil
