#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qkalman/golden.hpp"
#include "qkalman/io.hpp"
#include "test_support.hpp"

using namespace qkalman;
using qktest::max_abs;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "qkalman_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Two-mode input with every field present, exercised below in several forms.
std::string minimal_json() {
  return R"({
    "n": 1,
    "m": 1,
    "hamiltonian": [[1.5, 0.0], [0.0, 1.5]],
    "coupling_re": [[1.0, 0.0]],
    "coupling_im": [[0.0, 1.0]]
  })";
}

}  // namespace

TEST_CASE("parse_system_json accepts a minimal description") {
  const SystemFile file = parse_system_json(minimal_json());
  CHECK(file.model.n == 1);
  CHECK(file.model.m == 1);
  CHECK(file.model.hamiltonian(0, 0) == 1.5);
  CHECK(file.model.coupling(0, 1) == std::complex<double>(0.0, 1.0));
  // Defaults apply when options are absent.
  CHECK(file.options.horizon_t == 0.0);
  CHECK(file.options.horizon_s == 1.0);
  CHECK(!file.options.rank_tol.has_value());
  CHECK(file.options.ordering == BlockOrdering::Ttilde);
}

TEST_CASE("parse_system_json reads options") {
  const std::string text = R"({
    "n": 1,
    "m": 0,
    "hamiltonian": [[1.0, 0.0], [0.0, 1.0]],
    "coupling_re": [],
    "coupling_im": [],
    "options": {"horizon": [-1.0, 2.0], "rank_tol": 1e-10, "ordering": "T"}
  })";
  const SystemFile file = parse_system_json(text);
  CHECK(file.model.m == 0);
  CHECK(file.options.horizon_t == -1.0);
  CHECK(file.options.horizon_s == 2.0);
  CHECK(file.options.rank_tol == 1e-10);
  CHECK(file.options.ordering == BlockOrdering::T);
}

TEST_CASE("parse_system_json collects all violations into one message") {
  const std::string text = R"({
    "n": 2,
    "hamiltonian": [[1.0, 0.5], [0.4, 1.0]],
    "coupling_re": [[1.0, 0.0]],
    "coupling_im": [[0.0, "nan"]],
    "surprise": true
  })";
  try {
    parse_system_json(text);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("m") != std::string::npos);
    CHECK(what.find("hamiltonian") != std::string::npos);
    CHECK(what.find("surprise") != std::string::npos);
  }
}

TEST_CASE("parse_system_json rejections") {
  CHECK_THROWS_AS(parse_system_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_system_json("[]"), std::invalid_argument);

  SUBCASE("wrong shapes") {
    const std::string text = R"({
      "n": 2, "m": 1,
      "hamiltonian": [[1.0, 0.0], [0.0, 1.0]],
      "coupling_re": [[1.0, 0.0]],
      "coupling_im": [[0.0, 1.0]]
    })";
    CHECK_THROWS_WITH_AS(parse_system_json(text),
                         doctest::Contains("hamiltonian"), std::invalid_argument);
  }

  SUBCASE("non-finite entry") {
    const std::string text = R"({
      "n": 1, "m": 1,
      "hamiltonian": [[1e999, 0.0], [0.0, 1.0]],
      "coupling_re": [[1.0, 0.0]],
      "coupling_im": [[0.0, 1.0]]
    })";
    CHECK_THROWS_AS(parse_system_json(text), std::invalid_argument);
  }

  SUBCASE("asymmetric hamiltonian") {
    const std::string text = R"({
      "n": 1, "m": 1,
      "hamiltonian": [[1.0, 0.5], [0.3, 1.0]],
      "coupling_re": [[1.0, 0.0]],
      "coupling_im": [[0.0, 1.0]]
    })";
    CHECK_THROWS_WITH_AS(parse_system_json(text),
                         doctest::Contains("asymmetry"), std::invalid_argument);
  }

  SUBCASE("bad horizon order") {
    const std::string text = R"({
      "n": 1, "m": 1,
      "hamiltonian": [[1.0, 0.0], [0.0, 1.0]],
      "coupling_re": [[1.0, 0.0]],
      "coupling_im": [[0.0, 1.0]],
      "options": {"horizon": [2.0, 2.0]}
    })";
    CHECK_THROWS_WITH_AS(parse_system_json(text),
                         doctest::Contains("horizon"), std::invalid_argument);
  }

  SUBCASE("unknown ordering") {
    const std::string text = R"({
      "n": 1, "m": 1,
      "hamiltonian": [[1.0, 0.0], [0.0, 1.0]],
      "coupling_re": [[1.0, 0.0]],
      "coupling_im": [[0.0, 1.0]],
      "options": {"ordering": "Tfancy"}
    })";
    CHECK_THROWS_WITH_AS(parse_system_json(text),
                         doctest::Contains("ordering"), std::invalid_argument);
  }
}

TEST_CASE("system files round-trip bit-exactly") {
  SystemFile file = builtin_example("gzpg17");
  // Values with no short decimal form must survive the round trip untouched.
  file.model.hamiltonian(0, 2) = file.model.hamiltonian(2, 0) = 1.0 / 3.0;
  file.options.horizon_t = 0.1;
  file.options.horizon_s = std::numbers::pi;
  file.options.rank_tol = 3e-13;

  const SystemFile back = parse_system_json(system_file_to_json(file));
  CHECK(max_abs(back.model.hamiltonian - file.model.hamiltonian) == 0.0);
  CHECK(qktest::max_abs_c(back.model.coupling - file.model.coupling) == 0.0);
  CHECK(back.options.horizon_t == file.options.horizon_t);
  CHECK(back.options.horizon_s == file.options.horizon_s);
  CHECK(back.options.rank_tol == file.options.rank_tol);

  const auto path = temp_dir() / "roundtrip.json";
  write_system_file(file, path.string());
  const SystemFile from_disk = parse_system_file(path.string());
  CHECK(max_abs(from_disk.model.hamiltonian - file.model.hamiltonian) == 0.0);
}

TEST_CASE("builtin_example") {
  const SystemFile file = builtin_example("gzpg17");
  const SLHModel reference = gzpg17_model();
  CHECK(max_abs(file.model.hamiltonian - reference.hamiltonian) == 0.0);
  CHECK(qktest::max_abs_c(file.model.coupling - reference.coupling) == 0.0);
  CHECK_THROWS_AS(builtin_example("unknown"), std::invalid_argument);
}

TEST_CASE("run_pipeline on the three-mode network") {
  const PipelineResult result = run_pipeline(builtin_example("gzpg17"));
  CHECK(result.all_pass);
  CHECK(result.report.n == 3);
  CHECK(result.report.m == 1);
  CHECK(result.report.n1 == 1);
  CHECK(result.report.n2 == 1);
  CHECK(result.report.n3 == 1);
  CHECK(result.report.ordering == "Ttilde");
  CHECK(result.report.residual_physical_realizability < 1e-12);
  CHECK(result.report.residual_gramian_duality < 1e-12);
  CHECK(result.report.residual_orthogonality < 1e-12);
  CHECK(result.report.residual_block_symplectic < 1e-12);
  CHECK(result.report.residual_structural_zeros < 1e-12);
  CHECK(result.report.residual_hamiltonian_block < 1e-12);
  CHECK(result.report.residual_transfer_invariance < 1e-12);
  CHECK(result.report.all_pass());
  CHECK(result.report.warnings.empty());

  // Projectors in the report match the subspace bases up to symmetrization.
  const auto& subs = result.subspaces;
  CHECK(max_abs(result.report.p_co -
                subs.basis_co * subs.basis_co.transpose()) < 1e-14);
  CHECK(max_abs(result.report.p_cobar -
                subs.basis_cobar * subs.basis_cobar.transpose()) < 1e-14);
}

TEST_CASE("report serialization is deterministic and round-trips doubles") {
  const PipelineResult result = run_pipeline(builtin_example("gzpg17"));
  const std::string first = result.report.to_json();
  const std::string second = run_pipeline(builtin_example("gzpg17")).report.to_json();
  CHECK(first == second);

  // Spot-check the 17-digit float format round-trips one awkward value.
  const double awkward = result.report.t_tilde(0, 1);
  char printed[64];
  std::snprintf(printed, sizeof printed, "%.16e", awkward);
  CHECK(std::strtod(printed, nullptr) == awkward);
  CHECK(first.find(printed) != std::string::npos);
}

TEST_CASE("run_decompose exit codes and report file") {
  const auto dir = temp_dir();
  const auto infile = dir / "system.json";
  const auto outfile = dir / "report.json";
  write_system_file(builtin_example("gzpg17"), infile.string());

  SUBCASE("success writes the report and returns 0") {
    CHECK(run_decompose(infile.string(), outfile.string()) == 0);
    const std::string report = slurp(outfile);
    CHECK(report.find("\"dims\"") != std::string::npos);
    CHECK(report.find("\"residuals\"") != std::string::npos);
  }

  SUBCASE("missing input returns 1") {
    CHECK(run_decompose((dir / "nope.json").string(), outfile.string()) == 1);
  }

  SUBCASE("malformed input returns 1") {
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{\"n\": 1}";
    CHECK(run_decompose(bad.string(), outfile.string()) == 1);
  }

  SUBCASE("unwritable output returns 1") {
    CHECK(run_decompose(infile.string(), (dir / "no/such/dir/x.json").string()) == 1);
  }

  SUBCASE("cli overrides are honored") {
    CliOverrides overrides;
    overrides.ordering = BlockOrdering::T;
    overrides.horizon = {0.0, 0.5};
    CHECK(run_decompose(infile.string(), outfile.string(), overrides) == 0);
    const std::string report = slurp(outfile);
    CHECK(report.find("\"ordering\": \"T\"") != std::string::npos);
  }
}

TEST_CASE("run_check") {
  const auto dir = temp_dir();
  const auto infile = dir / "check.json";
  write_system_file(builtin_example("gzpg17"), infile.string());
  CHECK(run_check(infile.string()) == 0);
  CHECK(run_check(infile.string(), /*inject_nonrealizable=*/true) == 2);
  CHECK(run_check((dir / "nope.json").string()) == 1);
}

TEST_CASE("run_example writes a parseable input file") {
  const auto path = temp_dir() / "example.json";
  CHECK(run_example("gzpg17", 2.0, 1.0, std::numbers::sqrt2, path.string()) == 0);
  const SystemFile file = parse_system_file(path.string());
  CHECK(file.model.n == 3);
  CHECK(run_example("unknown", 2.0, 1.0, 1.0, path.string()) == 1);
}

TEST_CASE("command-line binary end to end") {
  // Baked in at configure time; overridable for out-of-tree runs.
  const char* cli = std::getenv("QKALMAN_CLI_OVERRIDE");
  if (cli == nullptr) cli = QKALMAN_CLI_PATH;
  REQUIRE(cli != nullptr);
  const auto dir = temp_dir();
  const auto input = dir / "cli_input.json";
  const auto report = dir / "cli_report.json";

  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
  };

  CHECK(run("example --out " + input.string()) == 0);
  CHECK(run("decompose " + input.string() + " --out " + report.string()) == 0);
  CHECK(slurp(report).find("\"n1\": 1") != std::string::npos);
  CHECK(run("check " + input.string()) == 0);

  // Option handling.
  CHECK(run("decompose " + input.string() + " --out " + report.string() +
            " --ordering T --horizon 0 0.5 --tol 1e-11") == 0);
  CHECK(run("decompose " + input.string() + " --out " + report.string() +
            " --ordering bogus") != 0);
  CHECK(run("decompose missing_file.json --out " + report.string()) == 1);
  CHECK(run("") != 0);          // a subcommand is required
  CHECK(run("decompose") != 0);  // input path is required
}
