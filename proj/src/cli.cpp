#include "qdil/cli.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "qdil/hardy.hpp"
#include "qdil/pair_dilation.hpp"
#include "qdil/tuple_dilation.hpp"

namespace qdil {

namespace {

constexpr const char* kSchema = "qdil-report/1";
constexpr int kFpSamplesPerPair = 4;
constexpr Eigen::Index kFpDim = 3;

class ReportBuilder {
 public:
  ReportBuilder(std::string command, const RunConfig& rc) : command_(std::move(command)) {
    doc_ = {{"schema", kSchema},
            {"command", command_},
            {"tolerances", tolerances_to_json(rc.tol)},
            {"parameters", json::object()},
            {"checks", json::array()},
            {"details", json::object()},
            {"error", nullptr}};
  }

  void check(const std::string& name, double value, double tol, bool required = true) {
    const bool pass = value <= tol;
    doc_["checks"].push_back(
        {{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}, {"required", required}});
    if (required && !pass) failed_.push_back(name);
  }

  void flag(const std::string& name, bool ok, bool required = true) {
    doc_["checks"].push_back(
        {{"name", name}, {"value", ok}, {"tolerance", nullptr}, {"pass", ok}, {"required", required}});
    if (required && !ok) failed_.push_back(name);
  }

  json& parameters() { return doc_["parameters"]; }
  json& details() { return doc_["details"]; }

  CommandResult finish(const std::string& headline) {
    const bool pass = failed_.empty();
    const int code = pass ? kExitPass : kExitVerificationFailure;
    doc_["status"] = pass ? "pass" : "fail";
    doc_["exit_code"] = code;
    std::ostringstream os;
    os << command_ << ' ' << (pass ? "pass" : "FAIL") << ": " << headline;
    if (!pass) {
      os << " (failed:";
      for (const auto& f : failed_) os << ' ' << f;
      os << ')';
    }
    return {doc_, code, os.str()};
  }

  CommandResult refuse(ErrorCode code, const std::string& message) {
    const int exit = exit_code_for(code);
    doc_["status"] = "error";
    doc_["exit_code"] = exit;
    doc_["error"] = {{"code", std::string(to_string(code))}, {"message", message}};
    return {doc_, exit, command_ + " error [" + std::string(to_string(code)) + "]: " + message};
  }

 private:
  std::string command_;
  json doc_;
  std::vector<std::string> failed_;
};

json relation_json(const RelationReport& r) {
  return {{"max_relation_residual", r.max_relation_residual},
          {"max_norm_excess", r.max_norm_excess},
          {"max_star_residual", r.max_star_residual},
          {"unitarity_defect", r.unitarity_defect},
          {"passed", r.passed}};
}

json positivity_json(const BrehmerReport& r) {
  json table = json::array();
  for (const auto& s : r.subsets) {
    table.push_back({{"G", s.subset.to_string()}, {"min_eigenvalue", s.min_eigenvalue}, {"psd", s.psd}});
  }
  return table;
}

json purity_json(const PurityReport& r) {
  return {{"spectral_radius", r.spectral_radius},
          {"adjoint_power_norms", r.power_norms},
          {"pure_each", r.pure_each},
          {"pure", r.pure}};
}

json tuple_parameters(const QTuple& t) {
  return {{"n", t.size()}, {"h_dim", t.dim()}, {"phases", phases_to_json(t.phases())}};
}

std::string format(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoConvergence:
    case ErrorCode::TruncationNotConverged:
      return kExitNoConvergence;
    case ErrorCode::InvalidInput:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::IoError:
    case ErrorCode::RelationViolated:
    case ErrorCode::NotPure:
    case ErrorCode::NotSzego:
    case ErrorCode::SubsetPositivityFailure:
      return kExitInputError;
    case ErrorCode::NotHermitian:
    case ErrorCode::NotPSD:
    case ErrorCode::GramMismatch:
    case ErrorCode::NotDominated:
    case ErrorCode::IsometryDefect:
    case ErrorCode::GenerationFailed:
      return kExitVerificationFailure;
  }
  return kExitVerificationFailure;
}

CommandResult cmd_gen(GeneratorSpec spec, const RunConfig& rc) {
  if (rc.seed) spec.seed = *rc.seed;
  const Instance inst = generate(spec, rc.tol);
  std::ostringstream os;
  os << "gen " << spec.kind << " seed " << spec.seed;
  if (const auto* t = std::get_if<QTuple>(&inst)) {
    const RelationReport r = verify_q_tuple(*t, rc.tol);
    os << ": n = " << t->size() << ", h_dim = " << t->dim()
       << ", relation residual " << format(r.max_relation_residual);
  } else {
    const QPair& p = std::get<QPair>(inst);
    const RelationReport r = verify_q_pair(p, rc.tol);
    os << ": " << to_string(p.variant) << " pair, h_dim = " << p.dim()
       << ", relation residual " << format(r.max_relation_residual);
  }
  return {instance_to_json(inst), kExitPass, os.str()};
}

CommandResult cmd_dilate_pair(const QPair& pair, const RunConfig& rc) {
  ReportBuilder rb("dilate-pair", rc);
  const PairDilation d = assemble_dilation(pair, rc.k_max, rc.tol);
  const PairDilationReport r = verify_pair_dilation(d, pair, rc.k_max, rc.tol);
  const double tol = rc.tol.verify_tol;

  rb.parameters() = {{"variant", std::string(to_string(pair.variant))},
                     {"h_dim", pair.dim()},
                     {"k_max", rc.k_max},
                     {"n_blocks", d.space.n_blocks},
                     {"space_dim", d.space.dim()}};
  rb.check("dilation_equality", r.max_dilation_residual, tol);
  rb.check("relation_" + std::string(to_string(pair.variant)), r.relation_residual, tol);
  rb.check("isometry_v1", r.isometry_defect_v1, tol);
  rb.check("isometry_v2", r.isometry_defect_v2, tol);
  rb.check("qtilde_h_block", r.qtilde_h_residual, tol);
  rb.check("qtilde_unitary", r.qtilde_unitarity_defect, tol);
  rb.flag("qtilde_block_structure", r.qtilde_block_structure);
  rb.check("coextension", r.coextension_residual, tol);
  rb.flag("truncation_exact", r.truncation_exact);
  rb.check("gap_gram", r.gap.gram_residual, tol);
  rb.check("gap_map", r.gap.map_residual, tol);
  rb.check("gap_unitary", r.gap.unitarity_defect, tol);
  rb.flag("gap_rank_match", r.gap.rank_a == r.gap.rank_b);

  json table = json::array();
  for (const auto& e : r.table) table.push_back({{"k1", e.k1}, {"k2", e.k2}, {"residual", e.residual}});
  rb.details() = {{"residual_table", std::move(table)},
                  {"max_support_slot", r.max_support_slot},
                  {"gap", {{"rank_a", r.gap.rank_a},
                           {"rank_b", r.gap.rank_b},
                           {"gram_residual", r.gap.gram_residual},
                           {"map_residual", r.gap.map_residual},
                           {"unitarity_defect", r.gap.unitarity_defect}}},
                  {"qtilde_reducing", pair.variant != Variant::Middle && r.qtilde_block_structure}};
  return rb.finish("max dilation residual " + format(r.max_dilation_residual) +
                   ", relation residual " + format(r.relation_residual));
}

CommandResult cmd_dilate_tuple(const QTuple& t, const RunConfig& rc) {
  const double tol = rc.tol.verify_tol;
  const RelationReport rel = verify_q_tuple(t, rc.tol);
  if (rc.mode == "pure") {
    ReportBuilder rb("dilate-tuple", rc);
    rb.parameters() = tuple_parameters(t);
    rb.parameters()["mode"] = "pure";
    rb.parameters()["deg"] = rc.deg;
    rb.parameters()["basis"] = std::string(TruncatedHardy::kBasisOrder);
    if (!rel.passed) {
      rb.details()["relations"] = relation_json(rel);
      return rb.refuse(ErrorCode::RelationViolated, "input is not a q-commuting contraction tuple");
    }
    const PurityReport purity = purity_check(t, rc.tol);
    const PsdCertificate szego = psd_check(szego_defect(t), rc.tol);
    rb.details()["purity"] = purity_json(purity);
    rb.details()["szego_min_eigenvalue"] = szego.min_eigenvalue;
    if (!purity.pure) return rb.refuse(ErrorCode::NotPure, "tuple is not pure");
    if (!szego.is_psd) return rb.refuse(ErrorCode::NotSzego, "Szego defect is not positive");

    const PureDilation pd = pure_dilation(t, rc.deg, rc.tol);
    rb.check("isometry", pd.report.isometry_defect, tol);
    for (std::size_t m = 0; m < t.size(); ++m) {
      rb.check("intertwining_" + std::to_string(m + 1), pd.report.intertwining.residuals[m], tol);
    }
    rb.details()["deg_used"] = pd.report.deg_used;
    rb.details()["deg_tried"] = pd.report.deg_tried;
    rb.details()["model_dim"] = pd.pi.space.dim();
    return rb.finish("isometry defect " + format(pd.report.isometry_defect) + ", intertwining " +
                     format(pd.report.intertwining.max_residual) + ", cap " +
                     std::to_string(pd.report.deg_used));
  }
  if (rc.mode != "brehmer") {
    fail(ErrorCode::InvalidInput, "mode must be 'pure' or 'brehmer'");
  }

  ReportBuilder rb("dilate-tuple", rc);
  rb.parameters() = tuple_parameters(t);
  rb.parameters()["mode"] = "brehmer";
  rb.parameters()["deg"] = rc.deg;
  rb.parameters()["basis"] = std::string(TruncatedHardy::kBasisOrder);
  if (!rel.passed) {
    rb.details()["relations"] = relation_json(rel);
    return rb.refuse(ErrorCode::RelationViolated, "input is not a q-commuting contraction tuple");
  }
  const BrehmerReport pos = brehmer_check(t, rc.tol);
  rb.details()["positivity"] = positivity_json(pos);
  if (!pos.passed) {
    rb.details()["offending_subset"] = pos.first_failure->to_string();
    return rb.refuse(ErrorCode::SubsetPositivityFailure,
                     "Brehmer positivity fails at G = " + pos.first_failure->to_string());
  }

  const BrehmerDilation bd = brehmer_dilation(t, rc.deg, rc.tol);
  const BrehmerDilationReport& r = bd.report;
  rb.check("isometry", r.isometry_defect, tol);
  for (std::size_t j = 0; j < t.size(); ++j) {
    rb.check("intertwining_" + std::to_string(j + 1), r.intertwining[j], tol);
  }
  rb.check("model_q_commutation", r.q_commutation_residual, tol);
  rb.check("model_doubly_q", r.doubly_residual, tol);

  json subsets = json::array();
  json nonzero = json::array();
  double coiso = 0.0;
  for (const auto& s : bd.subsets) {
    coiso = std::max({coiso, s.coisometry_residual, s.unitarity_residual});
    subsets.push_back({{"G", s.g.to_string()},
                       {"x_rank", s.h_g_dim},
                       {"sot_iterations", s.sot_iterations},
                       {"coisometry_residual", s.coisometry_residual},
                       {"unitarity_residual", s.unitarity_residual},
                       {"douglas_residual", s.douglas_residual},
                       {"defect_min_eigenvalue", s.defect_min_eigenvalue},
                       {"pi_norm", s.pi_norm},
                       {"intertwining", s.intertwining.residuals}});
    if (s.pi_norm > tol) nonzero.push_back(s.g.to_string());
  }
  rb.check("coisometry", coiso, tol);
  rb.details()["subsets"] = std::move(subsets);
  rb.details()["nonzero_subsets"] = std::move(nonzero);
  rb.details()["deg_used"] = r.deg_used;
  rb.details()["deg_tried"] = r.deg_tried;
  rb.details()["stacked_rows"] = bd.pi.rows();
  return rb.finish("isometry defect " + format(r.isometry_defect) + ", cap " +
                   std::to_string(r.deg_used));
}

CommandResult cmd_verify(const Instance& inst, const RunConfig& rc) {
  ReportBuilder rb("verify", rc);
  const double tol = rc.tol.verify_tol;
  if (const auto* pair = std::get_if<QPair>(&inst)) {
    const RelationReport rel = verify_q_pair(*pair, rc.tol);
    rb.parameters() = {{"type", "qpair"},
                       {"variant", std::string(to_string(pair->variant))},
                       {"h_dim", pair->dim()}};
    rb.check("relation", rel.max_relation_residual, tol);
    rb.check("norm_excess", rel.max_norm_excess, tol);
    rb.check("q_unitary", rel.unitarity_defect, tol);
    if (rel.max_norm_excess <= tol) {
      const auto [a, b] = gap_columns(*pair, rc.tol);
      rb.check("gap_gram", op_norm(a.adjoint() * a - b.adjoint() * b), tol);
    }
    rb.details()["relations"] = relation_json(rel);
    return rb.finish("relation residual " + format(rel.max_relation_residual));
  }

  const QTuple& t = std::get<QTuple>(inst);
  rb.parameters() = tuple_parameters(t);
  const RelationReport rel = verify_q_tuple(t, rc.tol);
  rb.check("relation", rel.max_relation_residual, tol);
  rb.check("norm_excess", rel.max_norm_excess, tol);
  rb.details()["relations"] = relation_json(rel);

  const RelationReport doubly = verify_doubly_q(t, rc.tol);
  rb.check("doubly_q", doubly.max_star_residual, tol, false);
  const PurityReport purity = purity_check(t, rc.tol);
  rb.flag("pure", purity.pure, false);
  rb.details()["purity"] = purity_json(purity);
  if (t.size() <= 12) {
    const BrehmerReport pos = brehmer_check(t, rc.tol);
    rb.flag("brehmer", pos.passed, false);
    rb.details()["positivity"] = positivity_json(pos);
  }

  // Rotational model on the same phases.
  const int cap = rc.deg > 0 ? rc.deg : 4;
  const TruncatedHardy model(t.size(), 1, cap);
  const RotationalReport rot = verify_rotational_properties(model, t.phases(), rc.tol);
  rb.check("model_q_commutation", rot.q_commutation, tol);
  rb.check("model_adjoint_formula", rot.adjoint_formula, tol);
  rb.check("model_isometry", rot.isometry, tol);
  rb.check("model_doubly_q", rot.doubly, tol);
  rb.flag("model_nilpotent", rot.nilpotent);
  rb.details()["model"] = {{"deg_cap", cap},
                           {"basis", std::string(TruncatedHardy::kBasisOrder)},
                           {"adjoint_power_norms", rot.adjoint_power_norms}};

  // Fuglede-Putnam samples for every phase of the tuple.
  Rng rng(rc.seed.value_or(0));
  double fp_worst = 0.0;
  int samples = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      for (int k = 0; k < kFpSamplesPerPair; ++k) {
        const Complex q = q_value(t.phases(), i, j);
        const auto [x, n] = gen_fuglede_putnam_sample(rng, q, kFpDim, rc.tol);
        const FugledePutnamReport fp = fuglede_putnam_check(x, n, q, rc.tol);
        fp_worst = std::max(fp_worst, fp.conclusion_residual);
        ++samples;
      }
    }
  }
  if (samples > 0) rb.check("fuglede_putnam", fp_worst, 10.0 * tol);
  rb.details()["fuglede_putnam_samples"] = samples;
  return rb.finish("relation residual " + format(rel.max_relation_residual) + ", model checks " +
                   (rot.passed ? "ok" : "failed"));
}

CommandResult run_command(const std::string& command, const RunConfig& rc) {
  ReportBuilder fallback(command, rc);
  try {
    rc.tol.validate();
    if (command == "gen") return cmd_gen(spec_from_json(read_json_file(rc.in_path)), rc);
    const Instance inst = instance_from_json(read_json_file(rc.in_path));
    if (command == "dilate-pair") {
      const auto* pair = std::get_if<QPair>(&inst);
      if (!pair) fail(ErrorCode::InvalidInput, "dilate-pair expects a qpair bundle");
      return cmd_dilate_pair(*pair, rc);
    }
    if (command == "dilate-tuple") {
      const auto* t = std::get_if<QTuple>(&inst);
      if (!t) fail(ErrorCode::InvalidInput, "dilate-tuple expects a qtuple bundle");
      return cmd_dilate_tuple(*t, rc);
    }
    if (command == "verify") return cmd_verify(inst, rc);
    fail(ErrorCode::InvalidInput, "unknown command '" + command + "'");
  } catch (const Error& e) {
    return fallback.refuse(e.code(), e.what());
  }
}

void emit(const CommandResult& result, const RunConfig& rc) {
  if (rc.out_path.empty()) {
    std::cout << result.document.dump(2) << '\n';
    std::cerr << result.summary << '\n';
    return;
  }
  write_json_file(rc.out_path, result.document);
  std::cout << result.summary << '\n';
}

}  // namespace qdil
