#include "qdil/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qdil/errors.hpp"

namespace qdil {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    fail(ErrorCode::DimensionMismatch, os.str());
  }
}

// Hermitian part of m after checking the anti-Hermitian part is negligible.
ComplexMatrix hermitian_part(const ComplexMatrix& m, double tol, const char* what) {
  const double scale = std::max(1.0, m.norm());
  const double asym = (m - m.adjoint()).norm();
  if (asym > tol * scale) {
    std::ostringstream os;
    os << what << ": input is not Hermitian (|M - M*|_F = " << asym << ")";
    fail(ErrorCode::NotHermitian, os.str());
  }
  return 0.5 * (m + m.adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

void ToleranceConfig::validate() const {
  if (!(eig_clamp > 0 && psd_tol > 0 && rank_tol > 0 && verify_tol > 0 && sot_tol > 0)) {
    fail(ErrorCode::InvalidInput, "tolerances must be strictly positive");
  }
  if (sot_max_iter < 1) {
    fail(ErrorCode::InvalidInput, "sot_max_iter must be at least 1");
  }
}

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 64) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

Eigen::Index numerical_rank(const RealVector& singular_values, double rank_tol) {
  if (singular_values.size() == 0 || !(singular_values(0) > 0.0)) return 0;
  const double cut = rank_tol * singular_values(0);
  Eigen::Index r = 0;
  while (r < singular_values.size() && singular_values(r) > cut) ++r;
  return r;
}

ComplexMatrix polar_isometry(const ComplexMatrix& m) {
  if (m.cols() == 0) return ComplexMatrix(m.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& m, const ToleranceConfig& cfg) {
  require_square(m, "hermitian_sqrt");
  if (m.size() == 0) return m;
  const ComplexMatrix h = hermitian_part(m, cfg.verify_tol, "hermitian_sqrt");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  RealVector evals = es.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  if (evals(0) < -cfg.eig_clamp * scale) {
    std::ostringstream os;
    os << "hermitian_sqrt: eigenvalue " << evals(0) << " below clamp band";
    fail(ErrorCode::NotPSD, os.str());
  }
  // The band is symmetric: rounding puts exact kernels of defect operators at
  // +-1e-16, and the square root would lift those to 1e-8.
  const double band = cfg.eig_clamp * scale;
  for (Eigen::Index i = 0; i < evals.size(); ++i) evals(i) = evals(i) <= band ? 0.0 : std::sqrt(evals(i));
  const ComplexMatrix& v = es.eigenvectors();
  ComplexMatrix s = v * evals.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (s + s.adjoint());
}

PsdCertificate psd_check(const ComplexMatrix& m, const ToleranceConfig& cfg) {
  require_square(m, "psd_check");
  if (m.size() == 0) return {0.0, true};
  const ComplexMatrix h = hermitian_part(m, cfg.verify_tol, "psd_check");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const RealVector& evals = es.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  PsdCertificate cert;
  cert.min_eigenvalue = evals(0);
  cert.is_psd = evals(0) >= -cfg.psd_tol * scale;
  return cert;
}

ComplexMatrix unitary_completion(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const ToleranceConfig& cfg) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, "unitary_completion: A and B must have equal shape");
  }
  const Eigen::Index d = a.rows();
  const double gram_gap = op_norm(a.adjoint() * a - b.adjoint() * b);
  if (gram_gap > cfg.verify_tol) {
    std::ostringstream os;
    os << "unitary_completion: |A*A - B*B| = " << gram_gap;
    fail(ErrorCode::GramMismatch, os.str());
  }
  if (d == 0) return ComplexMatrix(0, 0);

  Eigen::JacobiSVD<ComplexMatrix> svd_a(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::JacobiSVD<ComplexMatrix> svd_b(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index rank_a = numerical_rank(svd_a.singularValues(), cfg.rank_tol);
  const Eigen::Index rank_b = numerical_rank(svd_b.singularValues(), cfg.rank_tol);
  if (rank_a != rank_b) {
    std::ostringstream os;
    os << "unitary_completion: rank A = " << rank_a << " but rank B = " << rank_b;
    fail(ErrorCode::GramMismatch, os.str());
  }
  const Eigen::Index r = rank_a;

  // ran A -> ran B: u_i |-> B v_i / sigma_i, snapped to the nearest isometry.
  ComplexMatrix image(d, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    image.col(i) = b * svd_a.matrixV().col(i) / svd_a.singularValues()(i);
  }
  const ComplexMatrix w = polar_isometry(image);

  // Complements paired by position.
  ComplexMatrix complement = svd_b.matrixU().rightCols(d - r);
  complement -= w * (w.adjoint() * complement);
  complement = polar_isometry(complement);

  ComplexMatrix target(d, d);
  target << w, complement;
  const ComplexMatrix g = target * svd_a.matrixU().adjoint();

  const double unitary_defect = op_norm(g.adjoint() * g - identity(d));
  const double map_defect = op_norm(g * a - b);
  if (unitary_defect > 1e-12 || map_defect > cfg.verify_tol) {
    std::ostringstream os;
    os << "unitary_completion: completion failed (|G*G - I| = " << unitary_defect
       << ", |GA - B| = " << map_defect << ")";
    fail(ErrorCode::GramMismatch, os.str());
  }
  return g;
}

DouglasFactor douglas_solve(const ComplexMatrix& x, const ComplexMatrix& t,
                            const ToleranceConfig& cfg) {
  require_square(x, "douglas_solve");
  require_square(t, "douglas_solve");
  if (x.rows() != t.rows()) {
    fail(ErrorCode::DimensionMismatch, "douglas_solve: X and T must act on the same space");
  }
  const Eigen::Index h = x.rows();
  DouglasFactor out;
  if (h == 0) {
    out.s = ComplexMatrix(0, 0);
    out.range_basis = ComplexMatrix(0, 0);
    return out;
  }

  const ComplexMatrix xh = hermitian_part(x, cfg.verify_tol, "douglas_solve");
  const ComplexMatrix x2 = xh * xh;
  const ComplexMatrix gap = x2 - t * x2 * t.adjoint();
  const PsdCertificate dom = psd_check(0.5 * (gap + gap.adjoint()), cfg);
  if (dom.min_eigenvalue < -cfg.verify_tol) {
    std::ostringstream os;
    os << "douglas_solve: T X^2 T* is not dominated by X^2 (min eigenvalue " << dom.min_eigenvalue
       << ")";
    fail(ErrorCode::NotDominated, os.str());
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(xh);
  // Descending order so the basis is ordered by eigenvalue.
  const RealVector evals = es.eigenvalues().reverse();
  const ComplexMatrix evecs = es.eigenvectors().rowwise().reverse();
  // X is compared against contractions, so the rank cut is taken relative
  // to max(1, |X|); a relative cut alone would promote rounding noise of an
  // X that vanishes in exact arithmetic to a full range.
  const double cut = cfg.rank_tol * std::max(1.0, evals(0));
  Eigen::Index r = 0;
  while (r < h && evals(r) > cut) ++r;

  out.range_basis = evecs.leftCols(r);
  out.range_values = evals.head(r);
  const ComplexMatrix lam = out.range_values.cast<Complex>().asDiagonal();
  const ComplexMatrix lam_inv = out.range_values.cwiseInverse().cast<Complex>().asDiagonal();

  // S* = L U* T* U L^{-1}
  out.s = lam_inv * out.range_basis.adjoint() * t * out.range_basis * lam;

  const ComplexMatrix x_restricted = lam * out.range_basis.adjoint();
  out.residual = op_norm(out.s.adjoint() * x_restricted - x_restricted * t.adjoint());
  const double s_norm = op_norm(out.s);
  if (out.residual > cfg.verify_tol * std::max(1.0, op_norm(xh)) || s_norm > 1.0 + cfg.verify_tol) {
    std::ostringstream os;
    os << "douglas_solve: factorization residual " << out.residual << ", |S| = " << s_norm;
    fail(ErrorCode::NotDominated, os.str());
  }
  return out;
}

SotLimit sot_limit_power(const ComplexMatrix& a, const ToleranceConfig& cfg) {
  require_square(a, "sot_limit_power");
  const Eigen::Index h = a.rows();
  if (op_norm(a) > 1.0 + cfg.verify_tol) {
    fail(ErrorCode::InvalidInput, "sot_limit_power: input is not a contraction");
  }
  SotLimit out;
  ComplexMatrix m = identity(h);
  if (h == 0) {
    out.limit = m;
    return out;
  }
  const ComplexMatrix a_adj = a.adjoint();
  auto step = [&](const ComplexMatrix& cur) {
    ComplexMatrix next = a * cur * a_adj;
    return ComplexMatrix(0.5 * (next + next.adjoint()));
  };

  bool converged = false;
  for (std::size_t it = 1; it <= cfg.sot_max_iter; ++it) {
    ComplexMatrix next = step(m);
    out.residual = (next - m).norm();
    m = std::move(next);
    out.iterations = it;
    if (out.residual <= cfg.sot_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "sot_limit_power: no convergence after " << out.iterations
       << " iterations (residual " << out.residual << ")";
    fail(ErrorCode::NoConvergence, os.str());
  }
  const std::size_t polish = std::min(out.iterations, cfg.sot_max_iter);
  for (std::size_t it = 0; it < polish; ++it) m = step(m);
  out.limit = m;
  return out;
}

ComplexMatrix sylvester_residual(const ComplexMatrix& x, const ComplexMatrix& t2,
                                 const ComplexMatrix& q, Variant variant) {
  switch (variant) {
    case Variant::Left: return x * t2 - q * t2 * x;
    case Variant::Middle: return x * t2 - t2 * q * x;
    case Variant::Right: return x * t2 - t2 * x * q;
  }
  return x;
}

std::vector<ComplexMatrix> sylvester_nullspace(const ComplexMatrix& t2, const ComplexMatrix& q,
                                               Variant variant, const ToleranceConfig& cfg) {
  require_square(t2, "sylvester_nullspace");
  require_square(q, "sylvester_nullspace");
  if (t2.rows() != q.rows()) {
    fail(ErrorCode::DimensionMismatch, "sylvester_nullspace: T2 and Q must have equal size");
  }
  const Eigen::Index d = t2.rows();
  if (d == 0) return {};
  const ComplexMatrix id = identity(d);
  const ComplexMatrix right_mult = kron(t2.transpose(), id);
  ComplexMatrix op;
  switch (variant) {
    case Variant::Left: op = right_mult - kron(id, q * t2); break;
    case Variant::Middle: op = right_mult - kron(id, t2 * q); break;
    case Variant::Right: op = right_mult - kron(q.transpose(), t2); break;
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(op, Eigen::ComputeFullV);
  const Eigen::Index rank = numerical_rank(svd.singularValues(), cfg.rank_tol);
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d - rank));
  for (Eigen::Index c = rank; c < d * d; ++c) {
    const ComplexVector v = svd.matrixV().col(c);
    basis.emplace_back(Eigen::Map<const ComplexMatrix>(v.data(), d, d));
  }
  return basis;
}

}  // namespace qdil
