#include "run_config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "dynsbm/link_predict.hpp"

namespace dynsbm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument(msg);
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) bad("config key '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    bad("config key '" + key + "' must be an integer");
  }
  const long long x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() ||
      x > std::numeric_limits<int>::max()) {
    bad("config key '" + key + "' is out of range");
  }
  return static_cast<int>(x);
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (!v.is_number_integer() ||
      (!v.is_number_unsigned() && v.get<long long>() < 0)) {
    bad("config key '" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) bad("config key '" + key + "' must be a boolean");
  return v.get<bool>();
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& key) {
  if (v.is_number()) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v.get<double>();
    return m;
  }
  if (!v.is_array() || v.empty()) {
    bad("config key '" + key + "' must be a number or a square nested array");
  }
  const auto rows = v.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != rows) {
      bad("config key '" + key + "' must be a square nested array");
    }
    for (std::size_t j = 0; j < rows; ++j) {
      if (!row[j].is_number()) {
        bad("config key '" + key + "' must hold numbers");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          row[j].get<double>();
    }
  }
  return m;
}

std::vector<double> as_double_vector(const json& v, const std::string& key) {
  if (!v.is_array()) bad("config key '" + key + "' must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& e : v) {
    if (!e.is_number()) bad("config key '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

const std::set<std::string>& allowed_keys(Command cmd) {
  static const std::set<std::string> generate_keys = {
      "out",         "seed",        "node_count",      "k",
      "T",           "theta_init",  "mu0",             "gamma0_scale",
      "gamma_scale", "gamma_matrix", "membership_mode", "p_stay"};
  static const std::set<std::string> track_keys = {
      "edges",      "classes",    "out",          "seed",
      "node_count", "k",          "format",       "confidence_level",
      "epsilon",    "mu0_mode",   "mu0",          "gamma0_scale",
      "gamma_scale", "gamma_matrix"};
  static const std::set<std::string> fit_keys = {
      "edges",        "out",           "seed",
      "node_count",   "k",             "format",
      "epsilon",      "mu0_mode",      "mu0",
      "gamma0_scale", "gamma_scale",   "gamma_matrix",
      "max_sweeps",   "objective_tolerance", "exhaustive",
      "embedding_rank", "kmeans_restarts", "kmeans_max_iterations"};
  static const std::set<std::string> predict_keys = {
      "edges",        "classes",       "out",
      "seed",         "node_count",    "k",
      "epsilon",      "mu0_mode",      "mu0",
      "gamma0_scale", "gamma_scale",   "gamma_matrix",
      "max_sweeps",   "objective_tolerance",
      "embedding_rank", "kmeans_restarts", "kmeans_max_iterations",
      "lambda",       "eta",           "eta_grid",
      "validation_steps", "write_scores"};
  static const std::set<std::string> eval_roc_keys = {
      "scores", "edges", "out", "seed", "node_count", "time"};
  switch (cmd) {
    case Command::generate:
      return generate_keys;
    case Command::track:
      return track_keys;
    case Command::fit:
      return fit_keys;
    case Command::predict:
      return predict_keys;
    case Command::eval_roc:
      return eval_roc_keys;
  }
  bad("unreachable");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return nullptr;
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json path_or_null(const std::string& path) {
  if (path.empty()) return nullptr;
  return path;
}

}  // namespace

const char* command_name(Command cmd) {
  switch (cmd) {
    case Command::generate:
      return "generate";
    case Command::track:
      return "track";
    case Command::fit:
      return "fit";
    case Command::predict:
      return "predict";
    case Command::eval_roc:
      return "eval-roc";
  }
  return "unknown";
}

RunConfig load_run_config(Command cmd, const std::string& config_path) {
  RunConfig cfg;
  if (config_path.empty()) return cfg;
  std::ifstream in(config_path);
  if (!in) bad("cannot open config file: " + config_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("config file must hold a JSON object");

  const std::set<std::string>& allowed = allowed_keys(cmd);
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.contains(it.key())) {
      bad("unknown config key '" + it.key() + "' for command '" +
          command_name(cmd) + "'");
    }
  }

  auto get = [&doc](const char* key) -> const json* {
    auto it = doc.find(key);
    return it == doc.end() ? nullptr : &*it;
  };

  if (const json* v = get("edges")) cfg.edges = as_string(*v, "edges");
  if (const json* v = get("classes")) cfg.classes = as_string(*v, "classes");
  if (const json* v = get("scores")) cfg.scores = as_string(*v, "scores");
  if (const json* v = get("out")) cfg.out = as_string(*v, "out");
  if (const json* v = get("node_count"))
    cfg.node_count = as_int(*v, "node_count");
  if (const json* v = get("k")) cfg.k = as_int(*v, "k");
  if (const json* v = get("T")) cfg.T = as_int(*v, "T");
  if (const json* v = get("seed")) cfg.seed = as_seed(*v, "seed");
  if (const json* v = get("format")) cfg.format = as_string(*v, "format");
  if (const json* v = get("time")) cfg.time = as_int(*v, "time");
  if (const json* v = get("confidence_level"))
    cfg.confidence_level = as_double(*v, "confidence_level");
  if (const json* v = get("epsilon")) cfg.epsilon = as_double(*v, "epsilon");
  if (const json* v = get("mu0_mode"))
    cfg.mu0_mode = as_string(*v, "mu0_mode");
  if (const json* v = get("mu0")) cfg.mu0 = as_matrix(*v, "mu0");
  if (const json* v = get("gamma0_scale"))
    cfg.gamma0_scale = as_double(*v, "gamma0_scale");
  if (const json* v = get("gamma_scale"))
    cfg.gamma_scale = as_double(*v, "gamma_scale");
  if (const json* v = get("gamma_matrix"))
    cfg.gamma_matrix = as_string(*v, "gamma_matrix");
  if (const json* v = get("max_sweeps"))
    cfg.max_sweeps = as_int(*v, "max_sweeps");
  if (const json* v = get("objective_tolerance"))
    cfg.objective_tolerance = as_double(*v, "objective_tolerance");
  if (const json* v = get("exhaustive"))
    cfg.exhaustive = as_bool(*v, "exhaustive");
  if (const json* v = get("embedding_rank"))
    cfg.embedding_rank = as_int(*v, "embedding_rank");
  if (const json* v = get("kmeans_restarts"))
    cfg.kmeans_restarts = as_int(*v, "kmeans_restarts");
  if (const json* v = get("kmeans_max_iterations"))
    cfg.kmeans_max_iterations = as_int(*v, "kmeans_max_iterations");
  if (const json* v = get("lambda")) cfg.lambda = as_double(*v, "lambda");
  if (const json* v = get("eta")) cfg.eta = as_double(*v, "eta");
  if (const json* v = get("eta_grid"))
    cfg.eta_grid = as_double_vector(*v, "eta_grid");
  if (const json* v = get("validation_steps"))
    cfg.validation_steps = as_int(*v, "validation_steps");
  if (const json* v = get("write_scores"))
    cfg.write_scores = as_bool(*v, "write_scores");
  if (const json* v = get("theta_init"))
    cfg.theta_init = as_matrix(*v, "theta_init");
  if (const json* v = get("membership_mode"))
    cfg.membership_mode = as_string(*v, "membership_mode");
  if (const json* v = get("p_stay")) cfg.p_stay = as_double(*v, "p_stay");

  return cfg;
}

nlohmann::json resolved_json(Command cmd, const RunConfig& cfg) {
  json out;
  switch (cmd) {
    case Command::generate:
      out["out"] = cfg.out;
      out["seed"] = cfg.seed;
      out["node_count"] = cfg.node_count;
      out["k"] = cfg.k;
      out["T"] = cfg.T;
      out["theta_init"] = matrix_to_json(cfg.theta_init);
      out["mu0"] = matrix_to_json(cfg.mu0);
      out["gamma0_scale"] = cfg.gamma0_scale;
      out["gamma_scale"] = cfg.gamma_scale;
      out["gamma_matrix"] = path_or_null(cfg.gamma_matrix);
      out["membership_mode"] = cfg.membership_mode;
      out["p_stay"] = cfg.p_stay;
      break;
    case Command::track:
      out["edges"] = cfg.edges;
      out["classes"] = cfg.classes;
      out["out"] = cfg.out;
      out["seed"] = cfg.seed;
      out["node_count"] = cfg.node_count;
      out["k"] = cfg.k;
      out["format"] = cfg.format;
      out["confidence_level"] = cfg.confidence_level;
      out["epsilon"] = cfg.epsilon;
      out["mu0_mode"] = cfg.mu0_mode;
      out["mu0"] = matrix_to_json(cfg.mu0);
      out["gamma0_scale"] = cfg.gamma0_scale;
      out["gamma_scale"] = cfg.gamma_scale;
      out["gamma_matrix"] = path_or_null(cfg.gamma_matrix);
      break;
    case Command::fit:
      out["edges"] = cfg.edges;
      out["out"] = cfg.out;
      out["seed"] = cfg.seed;
      out["node_count"] = cfg.node_count;
      out["k"] = cfg.k;
      out["format"] = cfg.format;
      out["epsilon"] = cfg.epsilon;
      out["mu0_mode"] = cfg.mu0_mode;
      out["mu0"] = matrix_to_json(cfg.mu0);
      out["gamma0_scale"] = cfg.gamma0_scale;
      out["gamma_scale"] = cfg.gamma_scale;
      out["gamma_matrix"] = path_or_null(cfg.gamma_matrix);
      out["max_sweeps"] = cfg.max_sweeps;
      out["objective_tolerance"] = cfg.objective_tolerance;
      out["exhaustive"] = cfg.exhaustive;
      out["embedding_rank"] = cfg.embedding_rank;
      out["kmeans_restarts"] = cfg.kmeans_restarts;
      out["kmeans_max_iterations"] = cfg.kmeans_max_iterations;
      break;
    case Command::predict:
      out["edges"] = cfg.edges;
      out["classes"] = path_or_null(cfg.classes);
      out["out"] = cfg.out;
      out["seed"] = cfg.seed;
      out["node_count"] = cfg.node_count;
      out["k"] = cfg.k;
      out["epsilon"] = cfg.epsilon;
      out["mu0_mode"] = cfg.mu0_mode;
      out["mu0"] = matrix_to_json(cfg.mu0);
      out["gamma0_scale"] = cfg.gamma0_scale;
      out["gamma_scale"] = cfg.gamma_scale;
      out["gamma_matrix"] = path_or_null(cfg.gamma_matrix);
      out["max_sweeps"] = cfg.max_sweeps;
      out["objective_tolerance"] = cfg.objective_tolerance;
      out["embedding_rank"] = cfg.embedding_rank;
      out["kmeans_restarts"] = cfg.kmeans_restarts;
      out["kmeans_max_iterations"] = cfg.kmeans_max_iterations;
      out["lambda"] = cfg.lambda;
      out["eta"] = cfg.eta ? json(*cfg.eta) : json(nullptr);
      out["eta_grid"] =
          cfg.eta_grid.empty() ? json(default_eta_grid()) : json(cfg.eta_grid);
      out["validation_steps"] = cfg.validation_steps;
      out["write_scores"] = cfg.write_scores;
      break;
    case Command::eval_roc:
      out["scores"] = cfg.scores;
      out["edges"] = cfg.edges;
      out["out"] = cfg.out;
      out["seed"] = cfg.seed;
      out["node_count"] = cfg.node_count;
      out["time"] = cfg.time;
      break;
  }
  return out;
}

}  // namespace dynsbm::cli
