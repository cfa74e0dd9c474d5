#include "qdil/hardy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qdil/errors.hpp"

namespace qdil {

namespace {

constexpr std::size_t kMaxMonomials = std::size_t{1} << 24;

int degree(const MultiIndex& k) { return std::accumulate(k.begin(), k.end(), 0); }

}  // namespace

TruncatedHardy::TruncatedHardy(std::size_t n, Eigen::Index e_dim, int deg_cap)
    : n_(n), e_dim_(e_dim), deg_(deg_cap) {
  if (e_dim < 0) fail(ErrorCode::InvalidInput, "coefficient dimension must be nonnegative");
  if (deg_cap < 0) fail(ErrorCode::InvalidInput, "degree cap must be nonnegative");
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    count *= static_cast<std::size_t>(deg_cap) + 1;
    if (count > kMaxMonomials) {
      std::ostringstream os;
      os << "truncated Hardy space with n = " << n << ", cap " << deg_cap << " is too large";
      fail(ErrorCode::InvalidInput, os.str());
    }
  }

  monomials_.reserve(count);
  MultiIndex k(n, 0);
  for (std::size_t c = 0; c < count; ++c) {
    monomials_.push_back(k);
    for (std::size_t i = n; i-- > 0;) {
      if (k[i] < deg_cap) {
        ++k[i];
        break;
      }
      k[i] = 0;
    }
  }
  std::stable_sort(monomials_.begin(), monomials_.end(),
                   [](const MultiIndex& a, const MultiIndex& b) {
                     const int da = degree(a), db = degree(b);
                     return da != db ? da < db : a < b;
                   });
  lookup_.assign(count, 0);
  for (std::size_t idx = 0; idx < count; ++idx) lookup_[radix_position(monomials_[idx])] = idx;
}

std::size_t TruncatedHardy::radix_position(std::span<const int> k) const {
  std::size_t pos = 0;
  for (int ki : k) pos = pos * (static_cast<std::size_t>(deg_) + 1) + static_cast<std::size_t>(ki);
  return pos;
}

bool TruncatedHardy::contains(std::span<const int> k) const {
  if (k.size() != n_) return false;
  return std::all_of(k.begin(), k.end(), [&](int ki) { return ki >= 0 && ki <= deg_; });
}

std::size_t TruncatedHardy::monomial_index(std::span<const int> k) const {
  if (!contains(k)) fail(ErrorCode::IndexOutOfRange, "multi-index outside the truncated space");
  return lookup_[radix_position(k)];
}

std::vector<std::size_t> TruncatedHardy::monomials_up_to(int max_degree) const {
  std::vector<std::size_t> out;
  for (std::size_t idx = 0; idx < monomials_.size(); ++idx) {
    const auto& k = monomials_[idx];
    if (std::all_of(k.begin(), k.end(), [&](int ki) { return ki <= max_degree; })) {
      out.push_back(idx);
    }
  }
  return out;
}

std::vector<Eigen::Index> TruncatedHardy::basis_up_to(int max_degree) const {
  std::vector<Eigen::Index> out;
  for (std::size_t mono : monomials_up_to(max_degree)) {
    for (Eigen::Index t = 0; t < e_dim_; ++t) out.push_back(basis_index(mono, t));
  }
  return out;
}

ComplexMatrix MonomialOp::apply(const ComplexMatrix& x) const {
  if (x.rows() != dim()) fail(ErrorCode::DimensionMismatch, "MonomialOp::apply: row count");
  ComplexMatrix y = ComplexMatrix::Zero(x.rows(), x.cols());
  for (std::size_t src = 0; src < target.size(); ++src) {
    if (target[src] < 0) continue;
    const auto s = static_cast<Eigen::Index>(src) * e_dim;
    const auto t = static_cast<Eigen::Index>(target[src]) * e_dim;
    if (coeff.size() == 0) {
      y.middleRows(t, e_dim) = phases[src] * x.middleRows(s, e_dim);
    } else {
      y.middleRows(t, e_dim).noalias() = phases[src] * coeff * x.middleRows(s, e_dim);
    }
  }
  return y;
}

ComplexMatrix MonomialOp::apply_adjoint(const ComplexMatrix& x) const {
  if (x.rows() != dim()) fail(ErrorCode::DimensionMismatch, "MonomialOp::apply_adjoint: row count");
  ComplexMatrix y = ComplexMatrix::Zero(x.rows(), x.cols());
  for (std::size_t src = 0; src < target.size(); ++src) {
    if (target[src] < 0) continue;
    const auto s = static_cast<Eigen::Index>(src) * e_dim;
    const auto t = static_cast<Eigen::Index>(target[src]) * e_dim;
    if (coeff.size() == 0) {
      y.middleRows(s, e_dim) = std::conj(phases[src]) * x.middleRows(t, e_dim);
    } else {
      y.middleRows(s, e_dim).noalias() =
          std::conj(phases[src]) * coeff.adjoint() * x.middleRows(t, e_dim);
    }
  }
  return y;
}

ComplexMatrix MonomialOp::dense() const { return apply(identity(dim())); }

std::vector<std::size_t> all_vars(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

MonomialOp shift_op(const TruncatedHardy& sp, std::size_t m) {
  if (m >= sp.n_vars()) fail(ErrorCode::IndexOutOfRange, "shift variable out of range");
  MonomialOp op;
  op.e_dim = sp.e_dim();
  op.target.assign(sp.monomial_count(), -1);
  op.phases.assign(sp.monomial_count(), Complex(1.0, 0.0));
  for (std::size_t idx = 0; idx < sp.monomial_count(); ++idx) {
    MultiIndex k = sp.monomial(idx);
    ++k[m];
    if (sp.contains(k)) op.target[idx] = static_cast<long>(sp.monomial_index(k));
  }
  return op;
}

MonomialOp rotation_op(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m, int power,
                       std::span<const std::size_t> vars) {
  if (vars.size() != sp.n_vars()) {
    fail(ErrorCode::DimensionMismatch, "variable map length differs from the space");
  }
  MonomialOp op;
  op.e_dim = sp.e_dim();
  op.target.resize(sp.monomial_count());
  op.phases.resize(sp.monomial_count());
  for (std::size_t idx = 0; idx < sp.monomial_count(); ++idx) {
    op.target[idx] = static_cast<long>(idx);
    op.phases[idx] = monomial_phase(p, m, sp.monomial(idx), vars, power);
  }
  return op;
}

MonomialOp rotational_shift_op(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m,
                               std::span<const std::size_t> vars) {
  if (m >= vars.size()) fail(ErrorCode::IndexOutOfRange, "shift variable out of range");
  MonomialOp op = shift_op(sp, m);
  const MonomialOp rot = rotation_op(sp, p, vars[m], 1, vars);
  op.phases = rot.phases;
  return op;
}

MonomialOp twisted_unitary_op(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t j,
                              const ComplexMatrix& u, std::span<const std::size_t> vars) {
  if (u.rows() != sp.e_dim() || u.cols() != sp.e_dim()) {
    fail(ErrorCode::DimensionMismatch, "coefficient operator does not match the space");
  }
  MonomialOp op = rotation_op(sp, p, j, 2, vars);
  op.coeff = u;
  return op;
}

ComplexMatrix shift_matrix(const TruncatedHardy& sp, std::size_t m) {
  return shift_op(sp, m).dense();
}

ComplexMatrix rotation_matrix(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m,
                              int power) {
  const auto vars = all_vars(sp.n_vars());
  return rotation_op(sp, p, m, power, vars).dense();
}

ComplexMatrix rotational_shift(const TruncatedHardy& sp, const PhaseMatrix& p, std::size_t m) {
  const auto vars = all_vars(sp.n_vars());
  return rotational_shift_op(sp, p, m, vars).dense();
}

ComplexMatrix basis_columns(Eigen::Index dim, const std::vector<Eigen::Index>& idx) {
  ComplexMatrix x = ComplexMatrix::Zero(dim, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) x(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
  return x;
}

RotationalReport verify_rotational_properties(const TruncatedHardy& sp, const PhaseMatrix& p,
                                              const ToleranceConfig& cfg) {
  const std::size_t n = sp.n_vars();
  if (p.size() != n) fail(ErrorCode::DimensionMismatch, "phase matrix size differs from n");
  const int d = sp.deg_cap();
  const Eigen::Index dim = sp.dim();
  const auto vars = all_vars(n);

  std::vector<MonomialOp> ops;
  for (std::size_t m = 0; m < n; ++m) ops.push_back(rotational_shift_op(sp, p, m, vars));

  const ComplexMatrix x = basis_columns(dim, sp.basis_up_to(d - 2));
  RotationalReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix vi_x = ops[i].apply(x);
    rep.isometry = std::max(rep.isometry, op_norm(ops[i].apply_adjoint(vi_x) - x));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const ComplexMatrix vj_x = ops[j].apply(x);
      const ComplexMatrix comm = ops[i].apply(vj_x) - q_value(p, i, j) * ops[j].apply(vi_x);
      rep.q_commutation = std::max(rep.q_commutation, op_norm(comm));
      const ComplexMatrix star = ops[i].apply(ops[j].apply_adjoint(x)) -
                                 std::conj(q_value(p, i, j)) * ops[j].apply_adjoint(vi_x);
      rep.doubly = std::max(rep.doubly, op_norm(star));
    }
  }

  rep.adjoint_power_norms.assign(static_cast<std::size_t>(d) + 1, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    // Adjoint built from the coefficient formula a_{k+e_m} conj([q]_m^k).
    ComplexMatrix direct = ComplexMatrix::Zero(dim, dim);
    for (std::size_t idx = 0; idx < sp.monomial_count(); ++idx) {
      MultiIndex k = sp.monomial(idx);
      const Complex ph = std::conj(monomial_phase(p, m, k));
      ++k[m];
      if (!sp.contains(k)) continue;
      const std::size_t up = sp.monomial_index(k);
      for (Eigen::Index t = 0; t < sp.e_dim(); ++t) {
        direct(sp.basis_index(idx, t), sp.basis_index(up, t)) = ph;
      }
    }
    const ComplexMatrix v_dense = ops[m].dense();
    if (dim > 0) {
      rep.adjoint_formula =
          std::max(rep.adjoint_formula, (v_dense.adjoint() - direct).cwiseAbs().maxCoeff());
    }

    // Powers of V* are weighted partial permutations, so the norm is the
    // largest entry modulus.
    ComplexMatrix power = identity(dim);
    for (int k = 1; k <= d + 1; ++k) {
      power = ops[m].apply_adjoint(power);
      const double norm = dim > 0 ? power.cwiseAbs().maxCoeff() : 0.0;
      auto& slot = rep.adjoint_power_norms[static_cast<std::size_t>(k - 1)];
      slot = std::max(slot, norm);
    }
    if (dim > 0 && power.cwiseAbs().maxCoeff() != 0.0) rep.nilpotent = false;
  }

  const double tol = cfg.verify_tol;
  rep.passed = rep.q_commutation <= tol && rep.adjoint_formula <= tol && rep.isometry <= tol &&
               rep.doubly <= tol && rep.nilpotent;
  return rep;
}

}  // namespace qdil
