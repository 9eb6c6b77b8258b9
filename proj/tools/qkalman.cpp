#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qkalman/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kalman canonical decomposition of linear quantum systems"};
  app.require_subcommand(1);

  // decompose
  std::string in_path;
  std::string out_path = "report.json";
  double rank_tol = 0.0;
  std::vector<double> horizon;
  std::string ordering;
  auto* decompose = app.add_subcommand(
      "decompose", "Run the decomposition pipeline on a system file");
  decompose->add_option("input", in_path, "system description (JSON)")->required();
  decompose->add_option("--out", out_path, "report output path");
  auto* tol_opt =
      decompose->add_option("--tol", rank_tol, "relative rank tolerance override");
  decompose->add_option("--horizon", horizon, "Gramian horizon t s")->expected(2);
  decompose->add_option("--ordering", ordering, "block ordering of the report")
      ->check(CLI::IsMember({"T", "Ttilde"}));

  // check
  std::string check_path;
  bool inject = false;
  auto* check = app.add_subcommand(
      "check", "Verify physical realizability of a system file");
  check->add_option("input", check_path, "system description (JSON)")->required();
  check
      ->add_flag("--inject-nonrealizable", inject,
                 "replace the system with a non-realizable classical triple")
      ->group("");  // testing aid, hidden from help

  // example
  std::string name = "gzpg17";
  std::string example_out;
  double omega = 2.0;
  double lambda = 1.0;
  double gamma = std::numbers::sqrt2;
  auto* example =
      app.add_subcommand("example", "Write a built-in example system file");
  example->add_option("--name", name, "example name");
  example->add_option("--omega", omega, "cavity detuning");
  example->add_option("--lambda", lambda, "mode-cavity coupling");
  example->add_option("--gamma", gamma, "cavity-field coupling");
  example->add_option("--out", example_out, "output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (decompose->parsed()) {
    qkalman::CliOverrides overrides;
    if (tol_opt->count() > 0) overrides.rank_tol = rank_tol;
    if (!horizon.empty()) overrides.horizon = std::make_pair(horizon[0], horizon[1]);
    if (ordering == "T") overrides.ordering = qkalman::BlockOrdering::T;
    if (ordering == "Ttilde") overrides.ordering = qkalman::BlockOrdering::Ttilde;
    return qkalman::run_decompose(in_path, out_path, overrides);
  }
  if (check->parsed()) return qkalman::run_check(check_path, inject);
  return qkalman::run_example(name, omega, lambda, gamma, example_out);
}
