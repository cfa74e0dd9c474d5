#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qdil/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Isometric dilations of Q-commuting pairs and q-commuting tuples"};
  app.require_subcommand(1);

  qdil::RunConfig rc;
  std::string tolerances_path;
  double verify_tol = rc.tol.verify_tol;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("input", rc.in_path, input_help)->required()->check(CLI::ExistingFile);
    sub->add_option("--out", rc.out_path, "Write the JSON document here instead of stdout");
    sub->add_option("--tol", verify_tol, "Residual tolerance for every identity")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tolerances", tolerances_path, "JSON file overriding tolerance fields")
        ->check(CLI::ExistingFile);
  };

  auto* gen = app.add_subcommand("gen", "Generate an instance from a spec file");
  add_common(gen, "Generator spec JSON");
  gen->add_option("--seed", seed, "Override the spec seed");

  auto* pair = app.add_subcommand("dilate-pair", "Dilate a Q-commuting pair");
  add_common(pair, "QPair JSON");
  pair->add_option("--kmax", rc.k_max, "Largest total power checked")->check(CLI::Range(1, 64));

  auto* tuple = app.add_subcommand("dilate-tuple", "Dilate a q-commuting tuple");
  add_common(tuple, "QTuple JSON");
  tuple->add_option("--mode", rc.mode, "pure or brehmer")
      ->check(CLI::IsMember({"pure", "brehmer"}));
  tuple->add_option("--deg", rc.deg, "Degree cap (0 = adaptive)")->check(CLI::Range(0, 64));

  auto* verify = app.add_subcommand("verify", "Run the property battery on an instance");
  add_common(verify, "QTuple or QPair JSON");
  verify->add_option("--deg", rc.deg, "Degree cap of the model space (0 = 4)")
      ->check(CLI::Range(0, 12));
  verify->add_option("--seed", seed, "Seed for the Fuglede-Putnam samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : qdil::kExitInputError;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (const CLI::Option* opt = sub->get_option_no_throw("--seed"); opt && opt->count() > 0) {
    rc.seed = seed;
  }
  rc.tol.verify_tol = verify_tol;

  qdil::CommandResult result;
  try {
    if (!tolerances_path.empty()) {
      rc.tol = qdil::tolerances_from_json(qdil::read_json_file(tolerances_path), rc.tol);
      if (sub->count("--tol") > 0) rc.tol.verify_tol = verify_tol;
    }
    result = qdil::run_command(sub->get_name(), rc);
    qdil::emit(result, rc);
  } catch (const qdil::Error& e) {
    std::cerr << sub->get_name() << " error [" << qdil::to_string(e.code()) << "]: " << e.what()
              << '\n';
    return qdil::exit_code_for(e.code());
  }
  return result.exit_code;
}
