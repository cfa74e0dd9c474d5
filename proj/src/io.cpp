#include "qdil/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qdil/errors.hpp"

namespace qdil {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("field '") + key + "': " + e.what());
  }
}

Eigen::Index get_count(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(ErrorCode::InvalidInput, std::string("field '") + key + "' must be a nonnegative integer");
  }
  return static_cast<Eigen::Index>(v.get<long long>());
}

double finite_number(const json& v, const char* what) {
  if (!v.is_number()) fail(ErrorCode::InvalidInput, std::string(what) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(ErrorCode::InvalidInput, std::string(what) + ": non-finite value");
  return x;
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const Eigen::Index rows = get_count(j, "rows");
  const Eigen::Index cols = get_count(j, "cols");
  const json& data = field(j, "data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    std::ostringstream os;
    os << "matrix data must hold rows*cols = " << rows * cols << " entries";
    fail(ErrorCode::InvalidInput, os.str());
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& e = data[static_cast<std::size_t>(i * cols + k)];
      if (!e.is_array() || e.size() != 2) {
        fail(ErrorCode::InvalidInput, "matrix entries must be [re, im] pairs");
      }
      m(i, k) = Complex(finite_number(e[0], "matrix entry"), finite_number(e[1], "matrix entry"));
    }
  }
  return m;
}

json real_matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::InvalidInput, "ragged real matrix");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = finite_number(row[static_cast<std::size_t>(k)], "theta entry");
    }
  }
  return m;
}

json phases_to_json(const PhaseMatrix& p) {
  return {{"n", p.size()}, {"theta", real_matrix_to_json(p.matrix())}};
}

PhaseMatrix phases_from_json(const json& j) {
  const Eigen::Index n = get_count(j, "n");
  RealMatrix theta = real_matrix_from_json(field(j, "theta"));
  if (theta.rows() != n || theta.cols() != n) {
    fail(ErrorCode::InvalidInput, "theta must be n x n");
  }
  return PhaseMatrix(theta);
}

json tuple_to_json(const QTuple& t) {
  json ops = json::array();
  for (const auto& op : t.ops()) ops.push_back(matrix_to_json(op));
  return {{"type", "qtuple"}, {"n", t.size()}, {"phases", phases_to_json(t.phases())},
          {"ops", std::move(ops)}};
}

QTuple tuple_from_json(const json& j) {
  const Eigen::Index n = get_count(j, "n");
  const json& ops_json = field(j, "ops");
  if (!ops_json.is_array() || static_cast<Eigen::Index>(ops_json.size()) != n) {
    fail(ErrorCode::InvalidInput, "ops must be an array of n matrices");
  }
  std::vector<ComplexMatrix> ops;
  for (const auto& m : ops_json) ops.push_back(matrix_from_json(m));
  return QTuple(std::move(ops), phases_from_json(field(j, "phases")));
}

json pair_to_json(const QPair& p) {
  return {{"type", "qpair"},
          {"variant", std::string(to_string(p.variant))},
          {"T1", matrix_to_json(p.t1)},
          {"T2", matrix_to_json(p.t2)},
          {"Q", matrix_to_json(p.q)}};
}

QPair pair_from_json(const json& j) {
  QPair p{matrix_from_json(field(j, "T1")), matrix_from_json(field(j, "T2")),
          matrix_from_json(field(j, "Q")), parse_variant(get_as<std::string>(j, "variant"))};
  p.check_shapes();
  return p;
}

json instance_to_json(const Instance& inst) {
  if (const auto* t = std::get_if<QTuple>(&inst)) return tuple_to_json(*t);
  return pair_to_json(std::get<QPair>(inst));
}

Instance instance_from_json(const json& j) {
  const std::string type = get_as<std::string>(j, "type");
  if (type == "qtuple") return tuple_from_json(j);
  if (type == "qpair") return pair_from_json(j);
  fail(ErrorCode::InvalidInput, "unknown instance type '" + type + "'");
}

json spec_to_json(const GeneratorSpec& s) {
  json j = {{"kind", s.kind},   {"seed", s.seed},   {"n", s.n},
            {"dim", s.dim},     {"e_dim", s.e_dim}, {"deg", s.deg},
            {"weyl", s.weyl},   {"scale", s.scale}, {"variant", std::string(to_string(s.variant))},
            {"q_mode", s.q_mode}, {"q_angle", s.q_angle}, {"unitary", s.unitary}};
  if (s.q) j["q"] = matrix_to_json(*s.q);
  if (s.theta) j["theta"] = real_matrix_to_json(*s.theta);
  return j;
}

GeneratorSpec spec_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "generator spec must be an object");
  GeneratorSpec s;
  s.kind = get_as<std::string>(j, "kind");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("n")) s.n = static_cast<std::size_t>(get_count(j, "n"));
  if (j.contains("dim")) s.dim = get_count(j, "dim");
  if (j.contains("e_dim")) s.e_dim = get_count(j, "e_dim");
  if (j.contains("deg")) s.deg = static_cast<int>(get_count(j, "deg"));
  if (j.contains("weyl")) s.weyl = static_cast<int>(get_count(j, "weyl"));
  if (j.contains("scale")) s.scale = finite_number(j.at("scale"), "scale");
  if (j.contains("variant")) s.variant = parse_variant(get_as<std::string>(j, "variant"));
  if (j.contains("q_mode")) s.q_mode = get_as<std::string>(j, "q_mode");
  if (j.contains("q_angle")) s.q_angle = finite_number(j.at("q_angle"), "q_angle");
  if (j.contains("q")) s.q = matrix_from_json(j.at("q"));
  if (j.contains("theta")) s.theta = real_matrix_from_json(j.at("theta"));
  if (j.contains("unitary")) s.unitary = get_as<std::vector<std::size_t>>(j, "unitary");
  s.validate();
  return s;
}

json tolerances_to_json(const ToleranceConfig& cfg) {
  return {{"eig_clamp", cfg.eig_clamp}, {"psd_tol", cfg.psd_tol},
          {"rank_tol", cfg.rank_tol},   {"verify_tol", cfg.verify_tol},
          {"sot_tol", cfg.sot_tol},     {"sot_max_iter", cfg.sot_max_iter}};
}

ToleranceConfig tolerances_from_json(const json& j, ToleranceConfig base) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "tolerances must be an object");
  if (j.contains("eig_clamp")) base.eig_clamp = finite_number(j.at("eig_clamp"), "eig_clamp");
  if (j.contains("psd_tol")) base.psd_tol = finite_number(j.at("psd_tol"), "psd_tol");
  if (j.contains("rank_tol")) base.rank_tol = finite_number(j.at("rank_tol"), "rank_tol");
  if (j.contains("verify_tol")) base.verify_tol = finite_number(j.at("verify_tol"), "verify_tol");
  if (j.contains("sot_tol")) base.sot_tol = finite_number(j.at("sot_tol"), "sot_tol");
  if (j.contains("sot_max_iter")) {
    base.sot_max_iter = static_cast<std::size_t>(get_count(j, "sot_max_iter"));
  }
  base.validate();
  return base;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidInput, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace qdil
