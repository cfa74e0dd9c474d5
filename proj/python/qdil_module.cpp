#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "qdil/cli.hpp"
#include "qdil/errors.hpp"
#include "qdil/generators.hpp"
#include "qdil/io.hpp"
#include "qdil/linalg.hpp"
#include "qdil/pair_dilation.hpp"
#include "qdil/tuple_dilation.hpp"

namespace py = pybind11;
using namespace qdil;

namespace {

ToleranceConfig tolerances(double verify_tol) {
  ToleranceConfig cfg;
  cfg.verify_tol = verify_tol;
  cfg.validate();
  return cfg;
}

QTuple make_tuple(const std::vector<ComplexMatrix>& ops, const RealMatrix& theta) {
  return QTuple(ops, PhaseMatrix(theta));
}

// Reports travel as JSON text; the Python side parses them.
std::string report_text(const CommandResult& r) { return r.document.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dilations of q-commuting contraction tuples (C++ core)";

  // QdilError(code, message)
  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<Error>(m, "QdilError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object args = py::make_tuple(std::string(to_string(e.code())), std::string(e.what()));
      PyErr_SetObject(error_type.get_stored().ptr(), args.ptr());
    }
  });

  m.attr("BASIS_ORDER") = std::string(TruncatedHardy::kBasisOrder);

  m.def("hermitian_sqrt", [](const ComplexMatrix& a) { return hermitian_sqrt(a); }, py::arg("m"));
  m.def("unitary_completion",
        [](const ComplexMatrix& a, const ComplexMatrix& b) { return unitary_completion(a, b); },
        py::arg("a"), py::arg("b"));
  m.def(
      "sylvester_nullspace",
      [](const ComplexMatrix& t2, const ComplexMatrix& q, const std::string& variant) {
        return sylvester_nullspace(t2, q, parse_variant(variant));
      },
      py::arg("t2"), py::arg("q"), py::arg("variant") = "left");

  m.def(
      "szego_defect",
      [](const std::vector<ComplexMatrix>& ops, const RealMatrix& theta) {
        return szego_defect(make_tuple(ops, theta));
      },
      py::arg("ops"), py::arg("theta"));
  m.def(
      "brehmer_check",
      [](const std::vector<ComplexMatrix>& ops, const RealMatrix& theta) {
        const BrehmerReport r = brehmer_check(make_tuple(ops, theta));
        py::list out;
        for (const auto& s : r.subsets) {
          out.append(py::make_tuple(s.subset.to_string(), s.min_eigenvalue, s.psd));
        }
        return out;
      },
      py::arg("ops"), py::arg("theta"));

  m.def(
      "generate_json",
      [](const std::string& spec) {
        return instance_to_json(generate(spec_from_json(json::parse(spec)))).dump();
      },
      py::arg("spec"));

  m.def(
      "pair_dilation",
      [](const ComplexMatrix& t1, const ComplexMatrix& t2, const ComplexMatrix& q,
         const std::string& variant, std::size_t k_max) {
        QPair pair{t1, t2, q, parse_variant(variant)};
        pair.check_shapes();
        const PairDilation d = assemble_dilation(pair, k_max);
        return py::make_tuple(d.v1, d.v2, d.q_tilde);
      },
      py::arg("t1"), py::arg("t2"), py::arg("q"), py::arg("variant") = "left", py::arg("k_max") = 5);

  m.def(
      "pure_dilation_map",
      [](const std::vector<ComplexMatrix>& ops, const RealMatrix& theta, int deg) {
        const PureDilation d = pure_dilation(make_tuple(ops, theta), deg);
        return py::make_tuple(d.pi.matrix, d.report.deg_used);
      },
      py::arg("ops"), py::arg("theta"), py::arg("deg") = 0);

  m.def(
      "dilate_pair_json",
      [](const ComplexMatrix& t1, const ComplexMatrix& t2, const ComplexMatrix& q,
         const std::string& variant, std::size_t k_max, double verify_tol) {
        RunConfig rc;
        rc.tol = tolerances(verify_tol);
        rc.k_max = k_max;
        QPair pair{t1, t2, q, parse_variant(variant)};
        pair.check_shapes();
        return report_text(cmd_dilate_pair(pair, rc));
      },
      py::arg("t1"), py::arg("t2"), py::arg("q"), py::arg("variant") = "left", py::arg("k_max") = 5,
      py::arg("verify_tol") = 1e-8);

  m.def(
      "dilate_tuple_json",
      [](const std::vector<ComplexMatrix>& ops, const RealMatrix& theta, const std::string& mode,
         int deg, double verify_tol) {
        RunConfig rc;
        rc.tol = tolerances(verify_tol);
        rc.mode = mode;
        rc.deg = deg;
        const QTuple t = make_tuple(ops, theta);
        return report_text(cmd_dilate_tuple(t, rc));
      },
      py::arg("ops"), py::arg("theta"), py::arg("mode") = "pure", py::arg("deg") = 0,
      py::arg("verify_tol") = 1e-8);

  m.def(
      "verify_json",
      [](const std::string& instance, double verify_tol) {
        RunConfig rc;
        rc.tol = tolerances(verify_tol);
        const Instance inst = instance_from_json(json::parse(instance));
        return report_text(cmd_verify(inst, rc));
      },
      py::arg("instance"), py::arg("verify_tol") = 1e-8);
}
