#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "esep/cli.hpp"
#include "esep/fixtures.hpp"
#include "esep/io.hpp"
#include "esep/sem.hpp"

using namespace esep;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("every report starts with a reproducibility header") {
  Run r = cli({"esep", "--graph", "data/instrumental.dag"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "# esepc 1.0.0 command=esep seed=0 eps=1e-09"));
  CHECK(contains(r.out, "a={A} b={B} c={} d={D}"));
}

TEST_CASE("relation listing respects caps and the latent flag") {
  Run tight = cli({"esep", "--graph", "data/instrumental.dag", "--caps", "1,1,0,0"});
  CHECK(tight.code == 0);
  CHECK(contains(tight.out, "0 relation(s)"));
  Run lat = cli({"esep", "--graph", "data/instrumental.dag", "--latents"});
  CHECK(contains(lat.out, "d={U}"));
}

TEST_CASE("constraint derivation output") {
  Run r = cli({"derive", "--graph", "data/mediated_chain.dag", "--a", "A", "--b", "Y,Z",
               "--d", "X"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "I(A:XYZ) <= H(X)  tier=a-clear"));
  CHECK(contains(r.out, "tier=base subsumed"));
  Run bad = cli({"derive", "--graph", "data/mediated_chain.dag", "--a", "A", "--b", "X"});
  CHECK(bad.code == 2);
  CHECK(contains(bad.err, "error:"));
}

TEST_CASE("latent bound on the two-phenotype table") {
  Run r = cli({"latent-bound", "--dist", "data/phenotype_pair.dist", "--a", "X", "--b",
               "Y"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "max-bits 1.593525"));
  CHECK(contains(r.out, "cardinality 3.017858 ceiling 4"));
}

TEST_CASE("model checking drives the exit status") {
  Run fail = cli({"check", "--graph", "data/confounded_pair.dag", "--dist",
                  "data/phenotype_pair.dist", "--latent-card", "U=3"});
  CHECK(fail.code == 1);
  CHECK(contains(fail.out, "FALSIFIED"));
  CHECK(contains(fail.out, "latent U declared=3"));
  CHECK(contains(fail.out, "FAIL"));

  Run pass = cli({"check", "--graph", "data/confounded_pair.dag", "--dist",
                  "data/phenotype_pair.dist", "--latent-card", "U=4"});
  CHECK(pass.code == 0);
  CHECK(contains(pass.out, "consistent"));
}

TEST_CASE("comparison ranks the falsified candidate first") {
  SemModel wit = violation_witness(fixtures::timeseries_graph(true),
                                   {{"Y1"}, {"Y3", "Y4"}, {"Y2"}, {"Y5"}}, 0.99);
  std::string dist_path = "build/cli_witness.dist";
  {
    std::ofstream f(dist_path);
    REQUIRE(f.good());
    f << format_table(wit.observed_joint());
  }
  Run r = cli({"compare", "--graph", "data/timeseries.dag", "--graph",
               "data/timeseries_direct.dag", "--dist", dist_path});
  CHECK(r.code == 1);
  CHECK(contains(r.out, "model timeseries: FALSIFIED"));
  CHECK(contains(r.out, "model timeseries_direct: consistent"));
  CHECK(r.out.find("timeseries: FALSIFIED") < r.out.find("timeseries_direct"));
  std::remove(dist_path.c_str());
}

TEST_CASE("mediary bounds for the null-effect table") {
  Run r = cli({"mme", "--dist", "data/null_ace.dist", "--x", "X", "--y", "Y"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "lower 1.000000"));
  CHECK(contains(r.out, "upper-trivial 1.000000"));
  CHECK(contains(r.out, "numeric 1.0"));
  CHECK(contains(r.out, "w-cardinality 2"));
}

TEST_CASE("witness output is a parseable model plus its joint") {
  Run r = cli({"witness", "--kind", "gate", "--values", "2"});
  CHECK(r.code == 0);
  auto split_at = r.out.rfind("\n\n");  // model and table are blank-line separated
  REQUIRE(split_at != std::string::npos);
  std::size_t start = r.out.find('\n') + 1;  // skip the header line
  std::string sem_text = r.out.substr(start, split_at + 1 - start);
  SemModel sem = parse_sem(sem_text);
  CHECK(entropy(sem.observed_joint(), {"D"}) == doctest::Approx(1.0));
  std::string table_text = r.out.substr(split_at + 2);
  JointTable t = parse_table(table_text);
  CHECK(mutual_info(t, {"A"}, {"B"}) == doctest::Approx(1.5));
}

TEST_CASE("simulation is reproducible per seed") {
  std::vector<std::string> args = {"sim", "--graph", "data/instrumental.dag", "--seed",
                                   "5"};
  Run a = cli(args);
  Run b = cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  Run c = cli({"sim", "--graph", "data/instrumental.dag", "--seed", "6"});
  CHECK(c.out != a.out);
  // the emitted table parses and is normalized
  JointTable t = parse_table(a.out.substr(a.out.find('\n') + 1));
  CHECK(t.total() == doctest::Approx(1.0));
}

TEST_CASE("structured output format") {
  Run r = cli({"check", "--graph", "data/confounded_pair.dag", "--dist",
               "data/phenotype_pair.dist", "--latent-card", "U=3", "--format",
               "json-like"});
  CHECK(r.code == 1);
  CHECK(contains(r.out, "\"command\": \"check\""));
  CHECK(contains(r.out, "\"falsified\": true"));
  CHECK(contains(r.out, "\"required\": 4"));
}

TEST_CASE("reports can be written to a file") {
  std::string path = "build/cli_report.txt";
  Run r = cli({"latent-bound", "--dist", "data/phenotype_pair.dist", "--a", "X", "--b",
               "Y", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(contains(ss.str(), "max-bits 1.593525"));
  std::remove(path.c_str());
}

TEST_CASE("usage and input errors exit with status two") {
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"esep"}).code == 2);  // --graph is required
  CHECK(cli({"esep", "--graph", "data/no_such_file.dag"}).code == 2);
  Run bad = cli({"check", "--graph", "data/instrumental.dag", "--dist",
                 "data/phenotype_pair.dist"});
  CHECK(bad.code == 2);  // variable sets do not match
  CHECK(contains(bad.err, "error:"));
}
