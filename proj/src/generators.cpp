#include "qdil/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

#include "qdil/errors.hpp"
#include "qdil/hardy.hpp"
#include "qdil/tuple_dilation.hpp"

namespace qdil {

namespace {

constexpr int kSylvesterRetries = 16;
constexpr double kSelfCheckTol = 1e-12;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix matrix_power(const ComplexMatrix& a, int k) {
  ComplexMatrix out = identity(a.rows());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

Complex unit_phase(Rng& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  return std::polar(1.0, angle(rng));
}

// Clock-shift exponents (a_i, b_i) and the phases they induce on C^weyl.
struct WeylWords {
  std::vector<ComplexMatrix> ops;
  PhaseMatrix phases;
};

WeylWords weyl_words(Rng& rng, std::size_t n, int weyl) {
  std::uniform_int_distribution<int> exponent(0, weyl - 1);
  std::vector<int> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = exponent(rng);
    b[i] = exponent(rng);
  }
  const ComplexMatrix c = clock_matrix(weyl);
  const ComplexMatrix s = shift_cycle_matrix(weyl);
  WeylWords out;
  RealMatrix theta = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.ops.push_back(matrix_power(c, a[i]) * matrix_power(s, b[i]));
    for (std::size_t j = 0; j < n; ++j) {
      const int e = (a[i] * b[j] - b[i] * a[j]) % weyl;
      theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          2.0 * std::numbers::pi * e / weyl;
    }
  }
  out.phases = PhaseMatrix(theta);
  return out;
}

}  // namespace

void GeneratorSpec::validate() const {
  auto bad = [](const std::string& msg) { fail(ErrorCode::InvalidInput, msg); };
  if (!(scale > 0.0 && scale <= 1.0)) bad("scale must lie in (0, 1]");
  if (n < 1 || n > 20) bad("n must lie in [1, 20]");
  if (dim < 1) bad("dim must be positive");
  if (e_dim < 1) bad("e_dim must be positive");
  if (deg < 0) bad("deg must be nonnegative");
  if (weyl < 1) bad("weyl must be positive");
  for (std::size_t u : unitary) {
    if (u >= n) bad("unitary index out of range");
  }
  if (kind == "clock_shift") {
    if (dim < 2) bad("clock_shift needs dim >= 2");
  } else if (kind == "compressed_rotational") {
    if (theta && (theta->rows() != static_cast<Eigen::Index>(n) || theta->cols() != theta->rows())) {
      bad("theta must be n x n");
    }
  } else if (kind == "sylvester_qpair") {
    if (q && (q->rows() != dim || q->cols() != dim)) bad("Q must be dim x dim");
    if (q_mode != "identity" && q_mode != "scalar" && q_mode != "diagonal" && q_mode != "haar") {
      bad("unknown q_mode '" + q_mode + "'");
    }
  } else if (kind != "scaled_random" && kind != "mixed_brehmer") {
    bad("unknown generator kind '" + kind + "'");
  }
}

ComplexMatrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

ComplexMatrix random_contraction(Rng& rng, Eigen::Index dim, double norm) {
  ComplexMatrix g = gaussian_matrix(rng, dim, dim);
  const double s = op_norm(g);
  if (s == 0.0) return g;
  return (norm / s) * g;
}

ComplexMatrix random_unitary(Rng& rng, Eigen::Index dim) {
  const ComplexMatrix g = gaussian_matrix(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * identity(dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

ComplexMatrix random_diagonal_unitary(Rng& rng, Eigen::Index dim) {
  ComplexVector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = unit_phase(rng);
  return d.asDiagonal();
}

PhaseMatrix random_phases(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const auto m = static_cast<Eigen::Index>(n);
  RealMatrix theta = RealMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      theta(i, j) = angle(rng);
      theta(j, i) = -theta(i, j);
    }
  }
  return PhaseMatrix(theta);
}

ComplexMatrix clock_matrix(Eigen::Index d) {
  ComplexVector diag(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    diag(j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(d));
  }
  return diag.asDiagonal();
}

ComplexMatrix shift_cycle_matrix(Eigen::Index d) {
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) s((j + 1) % d, j) = 1.0;
  return s;
}

QTuple gen_clock_shift(Eigen::Index d, double scale) {
  if (d < 2) fail(ErrorCode::InvalidInput, "clock size must be at least 2");
  return QTuple({scale * clock_matrix(d), scale * shift_cycle_matrix(d)},
                PhaseMatrix::uniform(2, 2.0 * std::numbers::pi / static_cast<double>(d)));
}

QTuple gen_compressed_rotational(std::size_t n, Eigen::Index e_dim, int deg, double scale,
                                 const PhaseMatrix& p, const ToleranceConfig& cfg) {
  if (p.size() != n) fail(ErrorCode::DimensionMismatch, "phase matrix size differs from n");
  const TruncatedHardy sp(n, e_dim, deg);
  std::vector<ComplexMatrix> ops;
  for (std::size_t m = 0; m < n; ++m) ops.push_back(scale * rotational_shift(sp, p, m));
  QTuple t(std::move(ops), p);
  const PsdCertificate cert = psd_check(szego_defect(t), cfg);
  if (!cert.is_psd) {
    std::ostringstream os;
    os << "compressed rotational tuple has indefinite Szego defect (min eigenvalue "
       << cert.min_eigenvalue << ")";
    fail(ErrorCode::GenerationFailed, os.str());
  }
  return t;
}

QPair gen_sylvester_qpair(Eigen::Index h_dim, Variant variant, const ComplexMatrix& q,
                          std::uint64_t seed, double scale, const ToleranceConfig& cfg) {
  if (q.rows() != h_dim || q.cols() != h_dim) {
    fail(ErrorCode::DimensionMismatch, "Q must be h_dim x h_dim");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> modulus(0.3, 1.0);
  const ComplexMatrix id = identity(h_dim);
  for (int attempt = 0; attempt < kSylvesterRetries; ++attempt) {
    // Plant a rank-one solution X = x y* (Middle: Q* x y*) by forcing
    //   Left/Middle: T2 x = l Q* x,  y* T2 = l y*,   y orthogonal to (Q* - I) x
    //   Right:       T2 x = l x,     y* T2 = l y* Q, y orthogonal to (Q - I) x
    // and correcting a Gaussian draw by the least-norm update.
    const ComplexMatrix g = gaussian_matrix(rng, h_dim, h_dim);
    const ComplexVector x = gaussian_matrix(rng, h_dim, 1).col(0);
    ComplexVector y = gaussian_matrix(rng, h_dim, 1).col(0);
    Complex lambda = modulus(rng) * unit_phase(rng);
    const bool right = variant == Variant::Right;
    const ComplexVector c = right ? ComplexVector((q - id) * x) : ComplexVector((q.adjoint() - id) * x);
    ComplexVector y_perp = y;
    if (c.norm() > 0.0) y_perp -= c * (c.dot(y) / c.squaredNorm());
    if (x.norm() < 1e-8) continue;
    // When c spans the space (h_dim = 1, Q != 1) no y survives; plant x and y
    // in the kernel and cokernel of T2 instead, which needs no orthogonality.
    if (y_perp.norm() < 1e-8 * y.norm()) {
      lambda = 0.0;
    } else {
      y = y_perp;
    }

    const ComplexVector x_target = right ? ComplexVector(lambda * x) : ComplexVector(lambda * (q.adjoint() * x));
    const Eigen::RowVectorXcd y_target =
        right ? Eigen::RowVectorXcd(lambda * (y.adjoint() * q)) : Eigen::RowVectorXcd(lambda * y.adjoint());
    const ComplexVector a = x_target - g * x;
    const Eigen::RowVectorXcd b = y_target - y.adjoint() * g;
    const double xx = x.squaredNorm(), yy = y.squaredNorm();
    const Complex ya = y.dot(a);
    ComplexMatrix t2 = g + a * x.adjoint() / xx + y * b / yy - (ya / (xx * yy)) * (y * x.adjoint());
    if (const double n2 = op_norm(t2); n2 > 1e-12) {
      t2 *= scale / n2;
    } else {
      t2.setZero();
    }

    const auto basis = sylvester_nullspace(t2, q, variant, cfg);
    if (basis.empty()) continue;
    ComplexMatrix t1 = ComplexMatrix::Zero(h_dim, h_dim);
    const ComplexMatrix coef = gaussian_matrix(rng, static_cast<Eigen::Index>(basis.size()), 1);
    for (std::size_t i = 0; i < basis.size(); ++i) t1 += coef(static_cast<Eigen::Index>(i), 0) * basis[i];
    const double nrm = op_norm(t1);
    if (nrm < 1e-8) continue;
    t1 *= scale / nrm;

    QPair pair{t1, t2, q, variant};
    ToleranceConfig strict = cfg;
    strict.verify_tol = kSelfCheckTol;
    if (verify_q_pair(pair, strict).passed) return pair;
  }
  std::ostringstream os;
  os << "no " << to_string(variant) << " pair found for h_dim = " << h_dim << " after "
     << kSylvesterRetries << " attempts";
  fail(ErrorCode::GenerationFailed, os.str());
}

QTuple gen_scaled_random(std::size_t n, int weyl, Eigen::Index dim, double scale,
                         std::uint64_t seed) {
  Rng rng(seed);
  const WeylWords words = weyl_words(rng, n, weyl);
  std::uniform_real_distribution<double> modulus(0.0, 1.0);
  const Eigen::Index total = static_cast<Eigen::Index>(weyl) * dim;
  const ComplexMatrix u = random_unitary(rng, total);
  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < n; ++i) {
    ComplexVector diag(dim);
    for (Eigen::Index k = 0; k < dim; ++k) diag(k) = modulus(rng) * unit_phase(rng);
    const ComplexMatrix delta = diag.asDiagonal();
    ops.push_back(scale * (u * kron(words.ops[i], delta) * u.adjoint()));
  }
  return QTuple(std::move(ops), words.phases);
}

QTuple gen_mixed_brehmer(std::size_t n, int weyl, int deg, const std::vector<std::size_t>& unitary,
                         double scale, std::uint64_t seed) {
  Rng rng(seed);
  const WeylWords words = weyl_words(rng, n, weyl);
  std::vector<std::size_t> nil;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(unitary.begin(), unitary.end(), i) == unitary.end()) nil.push_back(i);
  }
  const TruncatedHardy model(nil.size(), 1, deg);
  const Eigen::Index k_dim = model.dim();
  const ComplexMatrix u = random_unitary(rng, static_cast<Eigen::Index>(weyl) * k_dim);
  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pos = std::find(nil.begin(), nil.end(), i);
    const ComplexMatrix m = pos == nil.end()
                                ? identity(k_dim)
                                : ComplexMatrix(scale * shift_matrix(model, static_cast<std::size_t>(pos - nil.begin())));
    ops.push_back(u * kron(words.ops[i], m) * u.adjoint());
  }
  return QTuple(std::move(ops), words.phases);
}

std::pair<ComplexMatrix, ComplexMatrix> gen_fuglede_putnam_sample(Rng& rng, Complex q,
                                                                  Eigen::Index dim,
                                                                  const ToleranceConfig& cfg) {
  if (dim < 2) fail(ErrorCode::InvalidInput, "Fuglede-Putnam samples need dim >= 2");
  std::uniform_real_distribution<double> modulus(0.2, 1.0);
  ComplexVector diag(dim);
  for (Eigen::Index i = 0; i < dim; ++i) diag(i) = modulus(rng) * unit_phase(rng);
  diag(1) = q * diag(0);
  const ComplexMatrix u = random_unitary(rng, dim);
  const ComplexMatrix n = u * diag.asDiagonal() * u.adjoint();
  const auto basis = sylvester_nullspace(n, q * identity(dim), Variant::Left, cfg);
  if (basis.empty()) fail(ErrorCode::GenerationFailed, "no solution of X N = q N X found");
  const ComplexMatrix coef = gaussian_matrix(rng, static_cast<Eigen::Index>(basis.size()), 1);
  ComplexMatrix x = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < basis.size(); ++i) x += coef(static_cast<Eigen::Index>(i), 0) * basis[i];
  return {x / std::max(op_norm(x), 1e-300), n};
}

QPair as_qpair(const QTuple& t) {
  if (t.size() != 2) fail(ErrorCode::InvalidInput, "as_qpair needs a 2-tuple");
  return QPair{t.op(0), t.op(1), q_value(t.phases(), 0, 1) * identity(t.dim()), Variant::Left};
}

ComplexMatrix spec_q(const GeneratorSpec& spec) {
  if (spec.q) return *spec.q;
  Rng rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  if (spec.q_mode == "identity") return identity(spec.dim);
  if (spec.q_mode == "scalar") return std::polar(1.0, spec.q_angle) * identity(spec.dim);
  if (spec.q_mode == "diagonal") return random_diagonal_unitary(rng, spec.dim);
  return random_unitary(rng, spec.dim);
}

Instance generate(const GeneratorSpec& spec, const ToleranceConfig& cfg) {
  spec.validate();
  ToleranceConfig strict = cfg;
  strict.verify_tol = kSelfCheckTol;
  auto check_tuple = [&](QTuple t) -> Instance {
    const RelationReport rep = verify_q_tuple(t, strict);
    if (!rep.passed) {
      std::ostringstream os;
      os << spec.kind << " instance misses its relations (residual " << rep.max_relation_residual
         << ", norm excess " << rep.max_norm_excess << ")";
      fail(ErrorCode::GenerationFailed, os.str());
    }
    return t;
  };

  if (spec.kind == "clock_shift") return check_tuple(gen_clock_shift(spec.dim, spec.scale));
  if (spec.kind == "compressed_rotational") {
    Rng rng(spec.seed);
    const PhaseMatrix p = spec.theta ? PhaseMatrix(*spec.theta) : random_phases(rng, spec.n);
    return check_tuple(gen_compressed_rotational(spec.n, spec.e_dim, spec.deg, spec.scale, p, cfg));
  }
  if (spec.kind == "scaled_random") {
    return check_tuple(gen_scaled_random(spec.n, spec.weyl, spec.dim, spec.scale, spec.seed));
  }
  if (spec.kind == "mixed_brehmer") {
    return check_tuple(
        gen_mixed_brehmer(spec.n, spec.weyl, spec.deg, spec.unitary, spec.scale, spec.seed));
  }
  return gen_sylvester_qpair(spec.dim, spec.variant, spec_q(spec), spec.seed, spec.scale, cfg);
}

}  // namespace qdil
