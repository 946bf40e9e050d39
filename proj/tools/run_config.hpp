#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dynsbm::cli {

enum class Command { generate, track, fit, predict, eval_roc };

const char* command_name(Command cmd);

/// Every configuration key across all subcommands, with its default.
/// Matrix-valued keys (mu0, theta_init) accept a scalar (broadcast) or a
/// k x k nested array; 0x0 means unset.
struct RunConfig {
  // paths and shapes
  std::string edges;
  std::string classes;
  std::string scores;
  std::string out = ".";
  int node_count = 0;
  int k = 0;  // 0 = unset; inferred from the class file where possible
  int T = 0;
  std::uint64_t seed = 0;
  std::string format = "csv";
  int time = 0;
  // state-space hyperparameters
  double confidence_level = 0.95;
  double epsilon = 1e-4;
  std::string mu0_mode = "data";
  Eigen::MatrixXd mu0;        // logit space
  double gamma0_scale = 1.0;
  double gamma_scale = 0.01;
  std::string gamma_matrix;   // path to a k^2 x k^2 matrix, overrides gamma_scale
  // a posteriori search
  int max_sweeps = 50;
  double objective_tolerance = 1e-9;
  bool exhaustive = false;
  // spectral initialization
  int embedding_rank = 0;
  int kmeans_restarts = 10;
  int kmeans_max_iterations = 100;
  // link prediction
  double lambda = 0.5;
  std::optional<double> eta;  // absent = tuned on the validation prefix
  std::vector<double> eta_grid;
  int validation_steps = 5;
  bool write_scores = false;
  // generator
  Eigen::MatrixXd theta_init;  // probability space
  std::string membership_mode = "static";
  double p_stay = 1.0;
};

/// Parses the JSON config file (empty path = all defaults). Keys not
/// consumed by `cmd` are rejected by name; so are type mismatches.
RunConfig load_run_config(Command cmd, const std::string& config_path);

/// The fully resolved configuration for `cmd`, exactly the keys it
/// consumes. Written to <out>/resolved_config.json by every command.
nlohmann::json resolved_json(Command cmd, const RunConfig& cfg);

}  // namespace dynsbm::cli
