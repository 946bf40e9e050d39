#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "commands.hpp"
#include "dynsbm/num.hpp"
#include "run_config.hpp"

namespace {

using dynsbm::cli::Command;
using dynsbm::cli::RunConfig;

/// Staging area for flag values; presence is read off the CLI11 options,
/// so defaults here never shadow the config file.
struct Flags {
  std::string config;
  std::string out;
  std::string edges;
  std::string classes;
  std::string scores;
  std::string format;
  std::string eta_grid;
  std::uint64_t seed = 0;
  int node_count = 0;
  int k = 0;
  int T = 0;
  int validation_steps = 0;
  int time = 0;
  double lambda = 0.0;
  double eta = 0.0;
  bool write_scores = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--seed", f.seed, "random seed");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(',', pos);
    const std::string token =
        text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      const double value = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      grid.push_back(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("--eta-grid expects comma-separated numbers");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic stochastic blockmodel toolkit"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* generate =
      app.add_subcommand("generate", "sample a synthetic dynamic network");
  add_common(generate, f);
  generate->add_option("--node-count", f.node_count, "number of nodes");
  generate->add_option("--k", f.k, "number of classes");
  generate->add_option("--T", f.T, "number of snapshots");

  CLI::App* track = app.add_subcommand(
      "track", "filter block probabilities under known classes");
  add_common(track, f);
  track->add_option("--edges", f.edges, "edge-list file");
  track->add_option("--classes", f.classes, "class-assignment file");
  track->add_option("--node-count", f.node_count, "number of nodes");
  track->add_option("--k", f.k, "number of classes (0 = infer)");
  track->add_option("--format", f.format, "output format: csv or json");

  CLI::App* fit = app.add_subcommand(
      "fit", "jointly estimate classes and block probabilities");
  add_common(fit, f);
  fit->add_option("--edges", f.edges, "edge-list file");
  fit->add_option("--node-count", f.node_count, "number of nodes");
  fit->add_option("--k", f.k, "number of classes");
  fit->add_option("--format", f.format, "output format: csv or json");

  CLI::App* predict =
      app.add_subcommand("predict", "score future edges and evaluate ROC");
  add_common(predict, f);
  predict->add_option("--edges", f.edges, "edge-list file");
  predict->add_option("--classes", f.classes,
                      "class-assignment file (omit to fit classes)");
  predict->add_option("--node-count", f.node_count, "number of nodes");
  predict->add_option("--k", f.k, "number of classes");
  predict->add_option("--lambda", f.lambda, "EWMA decay weight");
  predict->add_option("--eta", f.eta,
                      "combination weight on the EKF score (omit to tune)");
  predict->add_option("--eta-grid", f.eta_grid,
                      "comma-separated tuning grid for eta");
  predict->add_option("--validation-steps", f.validation_steps,
                      "number of leading targets used to tune eta");
  predict->add_flag("--write-scores", f.write_scores,
                    "write per-step score matrices");

  CLI::App* eval_roc =
      app.add_subcommand("eval-roc", "evaluate a score file against edges");
  add_common(eval_roc, f);
  eval_roc->add_option("--scores", f.scores, "score file (i,j,score lines)");
  eval_roc->add_option("--edges", f.edges, "edge-list file");
  eval_roc->add_option("--node-count", f.node_count, "number of nodes");
  eval_roc->add_option("--time", f.time, "snapshot index to evaluate against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Command cmd = Command::generate;
  CLI::App* sub = generate;
  if (track->parsed()) {
    cmd = Command::track;
    sub = track;
  } else if (fit->parsed()) {
    cmd = Command::fit;
    sub = fit;
  } else if (predict->parsed()) {
    cmd = Command::predict;
    sub = predict;
  } else if (eval_roc->parsed()) {
    cmd = Command::eval_roc;
    sub = eval_roc;
  }

  try {
    RunConfig cfg = dynsbm::cli::load_run_config(cmd, f.config);
    auto given = [&sub](const char* name) {
      const CLI::Option* opt = sub->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--out")) cfg.out = f.out;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--edges")) cfg.edges = f.edges;
    if (given("--classes")) cfg.classes = f.classes;
    if (given("--scores")) cfg.scores = f.scores;
    if (given("--format")) cfg.format = f.format;
    if (given("--node-count")) cfg.node_count = f.node_count;
    if (given("--k")) cfg.k = f.k;
    if (given("--T")) cfg.T = f.T;
    if (given("--lambda")) cfg.lambda = f.lambda;
    if (given("--eta")) cfg.eta = f.eta;
    if (given("--eta-grid")) cfg.eta_grid = parse_grid(f.eta_grid);
    if (given("--validation-steps")) cfg.validation_steps = f.validation_steps;
    if (given("--write-scores")) cfg.write_scores = f.write_scores;
    if (given("--time")) cfg.time = f.time;

    switch (cmd) {
      case Command::generate:
        return dynsbm::cli::cmd_generate(cfg);
      case Command::track:
        return dynsbm::cli::cmd_track(cfg);
      case Command::fit:
        return dynsbm::cli::cmd_fit(cfg);
      case Command::predict:
        return dynsbm::cli::cmd_predict(cfg);
      case Command::eval_roc:
        return dynsbm::cli::cmd_eval_roc(cfg);
    }
  } catch (const dynsbm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
