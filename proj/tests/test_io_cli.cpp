#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "qdil/cli.hpp"
#include "qdil/errors.hpp"
#include "qdil/generators.hpp"
#include "qdil/io.hpp"

using namespace qdil;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("qdil_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

CommandResult run(const std::string& cmd, const fs::path& in, RunConfig rc = {}) {
  rc.in_path = in;
  return run_command(cmd, rc);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qdil::Error thrown";
  return ErrorCode::IoError;
}

ComplexMatrix jordan() {
  ComplexMatrix j = ComplexMatrix::Zero(2, 2);
  j(1, 0) = 1.0;
  return j;
}

const json* find_check(const json& doc, const std::string& name) {
  for (const auto& c : doc.at("checks")) {
    if (c.at("name") == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST(Json, MatrixRoundTrip) {
  Rng rng(1);
  const ComplexMatrix m = gaussian_matrix(rng, 3, 2);
  const json j = matrix_to_json(m);
  EXPECT_EQ(j.at("rows"), 3);
  EXPECT_EQ(j.at("data").size(), 6u);
  EXPECT_EQ(matrix_from_json(json::parse(j.dump())), m);
}

TEST(Json, MatrixIsRowMajor) {
  const json j = json::parse(R"({"rows":1,"cols":2,"data":[[1,0],[0,2]]})");
  const ComplexMatrix m = matrix_from_json(j);
  EXPECT_EQ(m(0, 1), Complex(0.0, 2.0));
}

TEST(Json, MalformedMatrices) {
  const char* bad[] = {
      R"({"rows":2,"cols":2,"data":[[1,0]]})",
      R"({"rows":1,"cols":1,"data":[1]})",
      R"({"rows":1,"cols":1,"data":[["a",0]]})",
      R"({"cols":1,"data":[[1,0]]})",
      R"({"rows":-1,"cols":1,"data":[]})",
  };
  for (const char* s : bad) {
    EXPECT_EQ(code_of([&] { matrix_from_json(json::parse(s)); }), ErrorCode::InvalidInput) << s;
  }
}

TEST(Json, TupleAndPairRoundTrip) {
  const QTuple t = gen_clock_shift(3, 0.8);
  const QTuple t2 = tuple_from_json(json::parse(tuple_to_json(t).dump()));
  EXPECT_EQ(t2.op(1), t.op(1));
  EXPECT_NEAR(t2.phases().theta(0, 1), t.phases().theta(0, 1), 1e-15);

  const QPair p = gen_sylvester_qpair(2, Variant::Right, identity(2), 3, 0.9);
  const QPair p2 = pair_from_json(json::parse(pair_to_json(p).dump()));
  EXPECT_EQ(p2.t1, p.t1);
  EXPECT_EQ(p2.variant, Variant::Right);
  EXPECT_TRUE(std::holds_alternative<QPair>(instance_from_json(pair_to_json(p))));
}

TEST(Json, SpecAndTolerances) {
  GeneratorSpec s;
  s.kind = "mixed_brehmer";
  s.n = 3;
  s.unitary = {0, 2};
  s.seed = 99;
  const GeneratorSpec s2 = spec_from_json(spec_to_json(s));
  EXPECT_EQ(s2.kind, s.kind);
  EXPECT_EQ(s2.unitary, s.unitary);
  EXPECT_EQ(s2.seed, 99u);

  const ToleranceConfig c = tolerances_from_json(json::parse(R"({"verify_tol":1e-6})"), {});
  EXPECT_EQ(c.verify_tol, 1e-6);
  EXPECT_EQ(c.psd_tol, ToleranceConfig{}.psd_tol);
  EXPECT_THROW(tolerances_from_json(json::parse(R"({"psd_tol":0})"), {}), Error);
}

TEST(Json, FileErrors) {
  EXPECT_EQ(code_of([] { read_json_file("/nonexistent/qdil.json"); }), ErrorCode::IoError);
  TempDir dir;
  std::ofstream(dir.file("bad.json")) << "{ not json";
  EXPECT_EQ(code_of([&] { read_json_file(dir.file("bad.json")); }), ErrorCode::InvalidInput);
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::NotPSD), kExitVerificationFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::IsometryDefect), kExitVerificationFailure);
  EXPECT_EQ(exit_code_for(ErrorCode::RelationViolated), kExitInputError);
  EXPECT_EQ(exit_code_for(ErrorCode::SubsetPositivityFailure), kExitInputError);
  EXPECT_EQ(exit_code_for(ErrorCode::NoConvergence), kExitNoConvergence);
  EXPECT_EQ(exit_code_for(ErrorCode::TruncationNotConverged), kExitNoConvergence);
}

TEST(Cli, GenThenDilatePair) {
  TempDir dir;
  write_json_file(dir.file("spec.json"),
                  json::parse(R"({"kind":"sylvester_qpair","dim":3,"variant":"middle","seed":5,"scale":0.9})"));
  const CommandResult gen = run("gen", dir.file("spec.json"));
  ASSERT_EQ(gen.exit_code, kExitPass) << gen.summary;
  write_json_file(dir.file("pair.json"), gen.document);

  RunConfig rc;
  rc.k_max = 4;
  const CommandResult r = run("dilate-pair", dir.file("pair.json"), rc);
  EXPECT_EQ(r.exit_code, kExitPass) << r.summary;
  EXPECT_EQ(r.document.at("status"), "pass");
  EXPECT_NE(find_check(r.document, "relation_middle"), nullptr);
  EXPECT_EQ(r.document.at("details").at("residual_table").size(), 15u);
}

TEST(Cli, ViolatingPairIsInputError) {
  TempDir dir;
  Rng rng(2);
  const QPair p{random_contraction(rng, 2, 0.9), random_contraction(rng, 2, 0.9), identity(2),
                Variant::Left};
  write_json_file(dir.file("pair.json"), pair_to_json(p));
  const CommandResult r = run("dilate-pair", dir.file("pair.json"));
  EXPECT_EQ(r.exit_code, kExitInputError);
  EXPECT_EQ(r.document.at("error").at("code"), "RelationViolated");
}

TEST(Cli, DilateTuplePureAndBrehmer) {
  TempDir dir;
  write_json_file(dir.file("t.json"), tuple_to_json(gen_clock_shift(2, 0.6)));
  const CommandResult pure = run("dilate-tuple", dir.file("t.json"));
  EXPECT_EQ(pure.exit_code, kExitPass) << pure.summary;

  write_json_file(dir.file("u.json"), tuple_to_json(gen_clock_shift(2, 1.0)));
  RunConfig rc;
  rc.mode = "brehmer";
  const CommandResult b = run("dilate-tuple", dir.file("u.json"), rc);
  ASSERT_EQ(b.exit_code, kExitPass) << b.summary;
  EXPECT_EQ(b.document.at("details").at("nonzero_subsets"), json::array({"{}"}));

  const CommandResult refused = run("dilate-tuple", dir.file("u.json"));
  EXPECT_EQ(refused.exit_code, kExitInputError);
  EXPECT_EQ(refused.document.at("error").at("code"), "NotPure");
}

TEST(Cli, BrehmerRefusalNamesSubset) {
  TempDir dir;
  write_json_file(dir.file("j.json"), tuple_to_json(QTuple({jordan(), jordan()}, PhaseMatrix::zero(2))));
  RunConfig rc;
  rc.mode = "brehmer";
  const CommandResult r = run("dilate-tuple", dir.file("j.json"), rc);
  EXPECT_EQ(r.exit_code, kExitInputError);
  EXPECT_EQ(r.document.at("details").at("offending_subset"), "{1,2}");
  EXPECT_EQ(r.document.at("error").at("code"), "SubsetPositivityFailure");
}

TEST(Cli, VerifyTupleAndPair) {
  TempDir dir;
  write_json_file(dir.file("t.json"), tuple_to_json(gen_clock_shift(4, 0.9)));
  const CommandResult t = run("verify", dir.file("t.json"));
  EXPECT_EQ(t.exit_code, kExitPass) << t.summary;
  EXPECT_NE(find_check(t.document, "fuglede_putnam"), nullptr);

  write_json_file(dir.file("p.json"), pair_to_json(as_qpair(gen_clock_shift(2, 0.5))));
  EXPECT_EQ(run("verify", dir.file("p.json")).exit_code, kExitPass);

  const QTuple wrong({jordan(), jordan().adjoint()}, PhaseMatrix::zero(2));
  write_json_file(dir.file("w.json"), tuple_to_json(wrong));
  const CommandResult w = run("verify", dir.file("w.json"));
  EXPECT_EQ(w.exit_code, kExitVerificationFailure);
  EXPECT_EQ(w.document.at("status"), "fail");
}

TEST(Cli, MalformedInputs) {
  TempDir dir;
  std::ofstream(dir.file("empty.json")) << R"({"type":"qtuple","n":0,"phases":{"n":0,"theta":[]},"ops":[]})";
  EXPECT_EQ(run("verify", dir.file("empty.json")).exit_code, kExitInputError);
  std::ofstream(dir.file("garbage.json")) << "[1,2";
  EXPECT_EQ(run("verify", dir.file("garbage.json")).exit_code, kExitInputError);
  EXPECT_EQ(run("verify", dir.file("missing.json")).exit_code, kExitInputError);
  write_json_file(dir.file("t.json"), tuple_to_json(gen_clock_shift(2, 0.5)));
  EXPECT_EQ(run("dilate-pair", dir.file("t.json")).exit_code, kExitInputError);
}

TEST(Cli, ReportSchemaIsStable) {
  TempDir dir;
  write_json_file(dir.file("t.json"), tuple_to_json(gen_clock_shift(2, 0.5)));
  write_json_file(dir.file("p.json"), pair_to_json(as_qpair(gen_clock_shift(2, 0.5))));
  const std::set<std::string> keys{"schema",  "command", "tolerances", "parameters", "checks",
                                   "details", "error",   "status",     "exit_code"};
  const CommandResult docs[] = {run("verify", dir.file("t.json")),
                                run("dilate-tuple", dir.file("t.json")),
                                run("dilate-pair", dir.file("p.json")),
                                run("dilate-pair", dir.file("t.json"))};
  for (const auto& r : docs) {
    std::set<std::string> got;
    for (const auto& [k, v] : r.document.items()) got.insert(k);
    EXPECT_EQ(got, keys) << r.summary;
    EXPECT_EQ(r.document.at("schema"), "qdil-report/1");
  }
}
