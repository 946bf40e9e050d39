#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynsbm/aposteriori.hpp"
#include "dynsbm/link_predict.hpp"
#include "dynsbm/metrics.hpp"
#include "dynsbm/net_data.hpp"
#include "dynsbm/state_space.hpp"
#include "dynsbm/synth_gen.hpp"

namespace fs = std::filesystem;

namespace dynsbm::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument(msg);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) bad("cannot write " + path.string());
  out << content;
}

/// Every command drops its resolved configuration first, so a failed run
/// still documents what it was asked to do.
void write_resolved(Command cmd, const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  write_file(fs::path(cfg.out) / "resolved_config.json",
             resolved_json(cmd, cfg).dump(2) + "\n");
}

void require_node_count(const RunConfig& cfg) {
  if (cfg.node_count < 1) bad("node_count must be a positive integer");
}

void require_path(const std::string& path, const char* key) {
  if (path.empty()) bad(std::string(key) + " is required");
}

/// Scalar broadcast or full k x k; (a, b) lands at vector index a + b*k.
Eigen::VectorXd expand_to_state(const Eigen::MatrixXd& m, int k,
                                const char* key) {
  const int d = k * k;
  if (m.size() == 1) return Eigen::VectorXd::Constant(d, m(0, 0));
  if (m.rows() != k || m.cols() != k) {
    bad(std::string(key) + " must be a scalar or a " + std::to_string(k) +
        "x" + std::to_string(k) + " matrix");
  }
  Eigen::VectorXd v(d);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) v(vec_index(a, b, k)) = m(a, b);
  }
  return v;
}

Eigen::MatrixXd load_matrix_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) bad("cannot open matrix file: " + path);
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (!(in >> m(i, j))) {
        bad("matrix file " + path + " must hold " + std::to_string(dim) +
            "x" + std::to_string(dim) + " numbers");
      }
    }
  }
  double extra;
  if (in >> extra) {
    bad("matrix file " + path + " holds more than " + std::to_string(dim) +
        "x" + std::to_string(dim) + " numbers");
  }
  return m;
}

Eigen::MatrixXd build_gamma(const RunConfig& cfg, int d) {
  if (!cfg.gamma_matrix.empty()) return load_matrix_file(cfg.gamma_matrix, d);
  return cfg.gamma_scale * Eigen::MatrixXd::Identity(d, d);
}

/// mu0_mode=data derives the prior mean from the first snapshot's clamped
/// block densities under `init`; explicit mode takes cfg.mu0 in logit space.
Hyperparameters build_hyperparameters(const RunConfig& cfg, int k,
                                      const SnapshotSequence& seq,
                                      const ClassAssignment& init) {
  const int d = k * k;
  Eigen::VectorXd mu0(d);
  if (cfg.mu0_mode == "data") {
    if (seq.length() == 0) {
      bad("mu0_mode=data needs at least one snapshot");
    }
    const MleResult mle =
        mle_theta(block_counts(seq.at(0), init), cfg.epsilon);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        mu0(vec_index(a, b, k)) = logit(mle.theta.theta(a, b));
      }
    }
  } else if (cfg.mu0_mode == "explicit") {
    if (cfg.mu0.size() == 0) bad("mu0_mode=explicit requires the mu0 key");
    mu0 = expand_to_state(cfg.mu0, k, "mu0");
  } else {
    bad("mu0_mode must be 'data' or 'explicit'");
  }
  return make_hyperparameters(
      std::move(mu0), cfg.gamma0_scale * Eigen::MatrixXd::Identity(d, d),
      build_gamma(cfg, d), cfg.epsilon);
}

SpectralConfig build_spectral(const RunConfig& cfg) {
  SpectralConfig sc;
  sc.embedding_rank = cfg.embedding_rank;
  sc.kmeans_restarts = cfg.kmeans_restarts;
  sc.kmeans_max_iterations = cfg.kmeans_max_iterations;
  sc.seed = cfg.seed;
  return sc;
}

void append_block_columns(std::string& header, const char* stem, int k) {
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      header += ',';
      header += stem;
      header += '_';
      header += std::to_string(a);
      header += '_';
      header += std::to_string(b);
    }
  }
}

void append_block_values(std::string& row, const Eigen::MatrixXd& m) {
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    for (Eigen::Index b = 0; b < m.cols(); ++b) {
      row += ',';
      row += fmt(m(a, b));
    }
  }
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_roc_csv(const fs::path& path, const RocResult& roc) {
  std::string text = "threshold,fpr,tpr\n";
  for (const RocPoint& p : roc.points) {
    text += fmt(p.threshold);
    text += ',';
    text += fmt(p.fpr);
    text += ',';
    text += fmt(p.tpr);
    text += '\n';
  }
  write_file(path, text);
}

}  // namespace

int cmd_generate(const RunConfig& cfg) {
  require_node_count(cfg);
  if (cfg.k < 1 || cfg.k > cfg.node_count) bad("need 1 <= k <= node_count");
  if (cfg.T < 0) bad("T must be nonnegative");
  if (cfg.theta_init.size() != 0 && cfg.mu0.size() != 0) {
    bad("provide either theta_init or mu0, not both");
  }
  if (cfg.theta_init.size() == 0 && cfg.mu0.size() == 0) {
    bad("provide theta_init (probabilities) or mu0 (logits)");
  }
  const int k = cfg.k;
  Eigen::VectorXd mu0;
  if (cfg.theta_init.size() != 0) {
    const Eigen::VectorXd probs = expand_to_state(cfg.theta_init, k,
                                                  "theta_init");
    mu0.resize(probs.size());
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (!(probs(i) > 0.0 && probs(i) < 1.0)) {
        bad("theta_init entries must lie strictly inside (0, 1)");
      }
      mu0(i) = logit(probs(i));
    }
  } else {
    mu0 = expand_to_state(cfg.mu0, k, "mu0");
  }

  GeneratorSpec spec;
  spec.node_count = cfg.node_count;
  spec.k = k;
  spec.T = cfg.T;
  spec.hp = make_hyperparameters(
      std::move(mu0),
      cfg.gamma0_scale * Eigen::MatrixXd::Identity(k * k, k * k),
      build_gamma(cfg, k * k), 1e-4);
  if (cfg.membership_mode == "static") {
    spec.membership_mode = MembershipMode::fixed;
  } else if (cfg.membership_mode == "markov") {
    spec.membership_mode = MembershipMode::markov;
  } else {
    bad("membership_mode must be 'static' or 'markov'");
  }
  spec.p_stay = cfg.p_stay;
  spec.seed = cfg.seed;

  write_resolved(Command::generate, cfg);
  const GeneratedData data = generate(spec);

  save_snapshots((fs::path(cfg.out) / "edges.txt").string(), data.snapshots);

  std::string psi_csv = "t,a,b,psi\n";
  std::string theta_csv = "t,a,b,theta\n";
  for (int t = 1; t <= cfg.T; ++t) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const std::string prefix = std::to_string(t) + ',' +
                                   std::to_string(a) + ',' +
                                   std::to_string(b) + ',';
        psi_csv +=
            prefix + fmt(data.truth.psi(t - 1, vec_index(a, b, k))) + '\n';
        theta_csv +=
            prefix + fmt(data.truth.theta(t - 1, vec_index(a, b, k))) + '\n';
      }
    }
  }
  write_file(fs::path(cfg.out) / "psi.csv", psi_csv);
  write_file(fs::path(cfg.out) / "theta.csv", theta_csv);

  std::string membership_csv = "t,i,c\n";
  for (int t = 1; t <= cfg.T; ++t) {
    const ClassAssignment& classes = data.truth.memberships[t - 1];
    for (int i = 0; i < cfg.node_count; ++i) {
      membership_csv += std::to_string(t) + ',' + std::to_string(i) + ',' +
                        std::to_string(classes.label(i)) + '\n';
    }
  }
  write_file(fs::path(cfg.out) / "membership.csv", membership_csv);
  return 0;
}

int cmd_track(const RunConfig& cfg) {
  require_node_count(cfg);
  require_path(cfg.edges, "edges");
  require_path(cfg.classes, "classes");
  if (cfg.format != "csv" && cfg.format != "json") {
    bad("format must be 'csv' or 'json'");
  }
  const SnapshotSequence seq = load_snapshots(cfg.edges, cfg.node_count);
  const ClassAssignment classes =
      load_classes(cfg.classes, cfg.node_count, cfg.k);
  const int k = classes.k();

  write_resolved(Command::track, cfg);

  std::vector<TrackRecord> records;
  if (seq.length() > 0) {
    const Hyperparameters hp = build_hyperparameters(cfg, k, seq, classes);
    records = track_apriori(seq, {classes}, hp, cfg.confidence_level);
  }

  if (cfg.format == "csv") {
    std::string text = "t";
    append_block_columns(text, "theta", k);
    append_block_columns(text, "lower", k);
    append_block_columns(text, "upper", k);
    text += ",innovation_norm\n";
    for (std::size_t t = 0; t < records.size(); ++t) {
      const TrackRecord& rec = records[t];
      std::string row = std::to_string(t + 1);
      append_block_values(row, rec.theta);
      append_block_values(row, rec.lower);
      append_block_values(row, rec.upper);
      row += ',';
      row += fmt(rec.innovation_norm);
      text += row + '\n';
    }
    write_file(fs::path(cfg.out) / "track.csv", text);
  } else {
    json steps = json::array();
    for (std::size_t t = 0; t < records.size(); ++t) {
      const TrackRecord& rec = records[t];
      json step;
      step["t"] = t + 1;
      step["theta"] = matrix_rows(rec.theta);
      step["lower"] = matrix_rows(rec.lower);
      step["upper"] = matrix_rows(rec.upper);
      step["innovation_norm"] = rec.innovation_norm;
      steps.push_back(std::move(step));
    }
    write_file(fs::path(cfg.out) / "track.json", steps.dump(2) + "\n");
  }
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  require_node_count(cfg);
  require_path(cfg.edges, "edges");
  if (cfg.k < 1) bad("k is required and must be positive");
  if (cfg.format != "csv" && cfg.format != "json") {
    bad("format must be 'csv' or 'json'");
  }
  const SnapshotSequence seq = load_snapshots(cfg.edges, cfg.node_count);
  if (seq.length() == 0) bad("fit requires at least one snapshot");

  write_resolved(Command::fit, cfg);

  const SpectralConfig spectral = build_spectral(cfg);
  const ClassAssignment initial =
      spectral_init(seq.at(0), cfg.k, spectral).assignment;
  const Hyperparameters hp = build_hyperparameters(cfg, cfg.k, seq, initial);

  SequenceFitOptions options;
  options.k = cfg.k;
  options.search.max_sweeps = cfg.max_sweeps;
  options.search.objective_tolerance = cfg.objective_tolerance;
  options.search.exhaustive = cfg.exhaustive;
  options.spectral = spectral;
  options.initial = initial;
  const std::vector<FitResult> results = fit_sequence(seq, hp, options);

  const int k = cfg.k;
  if (cfg.format == "csv") {
    std::string text =
        "t,objective,sweeps,moves_accepted,budget_limited,"
        "label_agreement_prev";
    append_block_columns(text, "theta", k);
    text += '\n';
    for (std::size_t t = 0; t < results.size(); ++t) {
      const FitResult& res = results[t];
      std::string row = std::to_string(t + 1);
      row += ',';
      row += fmt(res.objective);
      row += ',';
      row += std::to_string(res.sweeps);
      row += ',';
      row += std::to_string(res.moves_accepted);
      row += ',';
      row += res.budget_limited ? "1" : "0";
      row += ',';
      row += t == 0 ? "nan"
                    : fmt(label_agreement(results[t - 1].assignment,
                                          res.assignment));
      append_block_values(row,
                          vec_to_matrix(logistic(res.posterior.mean), k));
      text += row + '\n';
    }
    write_file(fs::path(cfg.out) / "fit.csv", text);

    std::string assignments = "t,i,c\n";
    for (std::size_t t = 0; t < results.size(); ++t) {
      for (int i = 0; i < cfg.node_count; ++i) {
        assignments += std::to_string(t + 1) + ',' + std::to_string(i) + ',' +
                       std::to_string(results[t].assignment.label(i)) + '\n';
      }
    }
    write_file(fs::path(cfg.out) / "assignments.csv", assignments);
  } else {
    json steps = json::array();
    for (std::size_t t = 0; t < results.size(); ++t) {
      const FitResult& res = results[t];
      json step;
      step["t"] = t + 1;
      step["objective"] = res.objective;
      step["sweeps"] = res.sweeps;
      step["moves_accepted"] = res.moves_accepted;
      step["budget_limited"] = res.budget_limited;
      step["label_agreement_prev"] =
          t == 0 ? json(nullptr)
                 : json(label_agreement(results[t - 1].assignment,
                                        res.assignment));
      step["theta"] = matrix_rows(vec_to_matrix(logistic(res.posterior.mean),
                                                k));
      step["assignment"] = res.assignment.labels();
      steps.push_back(std::move(step));
    }
    write_file(fs::path(cfg.out) / "fit.json", steps.dump(2) + "\n");
  }
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  require_node_count(cfg);
  require_path(cfg.edges, "edges");
  const SnapshotSequence seq = load_snapshots(cfg.edges, cfg.node_count);
  if (seq.length() < 2) bad("prediction requires at least two snapshots");

  write_resolved(Command::predict, cfg);

  PredictionInputs inputs;
  int k = 0;
  if (!cfg.classes.empty()) {
    const ClassAssignment classes =
        load_classes(cfg.classes, cfg.node_count, cfg.k);
    k = classes.k();
    const Hyperparameters hp = build_hyperparameters(cfg, k, seq, classes);
    const std::vector<TrackRecord> records =
        track_apriori(seq, {classes}, hp, 0.95);
    inputs.classes.push_back(classes);
    for (const TrackRecord& rec : records) {
      inputs.theta.push_back(
          plugin_probabilities(rec.posterior.mean, k, hp.epsilon));
    }
  } else {
    if (cfg.k < 1) bad("k is required when no class file is given");
    k = cfg.k;
    const SpectralConfig spectral = build_spectral(cfg);
    const ClassAssignment initial =
        spectral_init(seq.at(0), k, spectral).assignment;
    const Hyperparameters hp = build_hyperparameters(cfg, k, seq, initial);
    SequenceFitOptions options;
    options.k = k;
    options.search.max_sweeps = cfg.max_sweeps;
    options.search.objective_tolerance = cfg.objective_tolerance;
    options.spectral = spectral;
    options.initial = initial;
    for (const FitResult& res : fit_sequence(seq, hp, options)) {
      inputs.theta.push_back(
          plugin_probabilities(res.posterior.mean, k, hp.epsilon));
      inputs.classes.push_back(res.assignment);
    }
  }

  const bool tuned = !cfg.eta.has_value();
  double eta;
  if (tuned) {
    TuneConfig tune;
    tune.eta_grid = cfg.eta_grid;
    tune.validation_steps = cfg.validation_steps;
    eta = tune_eta(seq, inputs, cfg.lambda, tune);
  } else {
    eta = *cfg.eta;
  }

  const SequencePrediction prediction =
      predict_sequence(seq, inputs, cfg.lambda, eta);

  write_roc_csv(fs::path(cfg.out) / "roc.csv",
                prediction.combined_eval.roc_pooled);

  json summary;
  summary["auc"] = prediction.combined_eval.auc_pooled;
  summary["auc_ekf"] = prediction.ekf_eval.auc_pooled;
  summary["auc_ewma"] = prediction.ewma_eval.auc_pooled;
  summary["lambda"] = prediction.lambda;
  summary["eta"] = prediction.eta;
  summary["eta_tuned"] = tuned;
  summary["per_step_auc"] = prediction.combined_eval.auc_per_step;
  summary["per_step_auc_ekf"] = prediction.ekf_eval.auc_per_step;
  summary["per_step_auc_ewma"] = prediction.ewma_eval.auc_per_step;
  json targets = json::array();
  for (const PredictionScores& scores : prediction.combined) {
    targets.push_back(scores.target_time);
  }
  summary["target_times"] = std::move(targets);
  write_file(fs::path(cfg.out) / "summary.json", summary.dump(2) + "\n");

  if (cfg.write_scores) {
    for (const PredictionScores& scores : prediction.combined) {
      std::string text = "i,j,score\n";
      for (int i = 0; i < cfg.node_count; ++i) {
        for (int j = 0; j < cfg.node_count; ++j) {
          if (i == j) continue;
          text += std::to_string(i) + ',' + std::to_string(j) + ',' +
                  fmt(scores.scores(i, j)) + '\n';
        }
      }
      write_file(fs::path(cfg.out) /
                     ("scores_t" + std::to_string(scores.target_time) +
                      ".csv"),
                 text);
    }
  }
  return 0;
}

namespace {

Eigen::MatrixXd load_scores_file(const std::string& path, int node_count) {
  std::ifstream in(path);
  if (!in) bad("cannot open scores file: " + path);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(node_count, node_count);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(node_count, node_count);
  std::string line;
  int line_number = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped && line.rfind("i,j,score", 0) == 0) {
      header_skipped = true;
      continue;
    }
    std::istringstream parts(line);
    int i, j;
    double value;
    char comma1, comma2, extra;
    if (!(parts >> i >> comma1 >> j >> comma2 >> value) || comma1 != ',' ||
        comma2 != ',' || (parts >> extra)) {
      bad("scores file line " + std::to_string(line_number) +
          " is not 'i,j,score'");
    }
    if (i < 0 || i >= node_count || j < 0 || j >= node_count) {
      bad("scores file line " + std::to_string(line_number) +
          ": node index out of range");
    }
    if (i == j) {
      bad("scores file line " + std::to_string(line_number) +
          ": diagonal pairs are excluded");
    }
    if (seen(i, j)) {
      bad("scores file line " + std::to_string(line_number) +
          ": duplicate pair");
    }
    seen(i, j) = 1;
    scores(i, j) = value;
  }
  for (int i = 0; i < node_count; ++i) {
    for (int j = 0; j < node_count; ++j) {
      if (i != j && !seen(i, j)) {
        bad("scores file is missing pair (" + std::to_string(i) + ", " +
            std::to_string(j) + ")");
      }
    }
  }
  return scores;
}

}  // namespace

int cmd_eval_roc(const RunConfig& cfg) {
  require_node_count(cfg);
  require_path(cfg.scores, "scores");
  require_path(cfg.edges, "edges");
  const SnapshotSequence seq = load_snapshots(cfg.edges, cfg.node_count);
  if (cfg.time < 0 || cfg.time >= seq.length()) {
    bad("time index " + std::to_string(cfg.time) +
        " is outside the loaded sequence");
  }

  write_resolved(Command::eval_roc, cfg);

  const Eigen::MatrixXd scores = load_scores_file(cfg.scores, cfg.node_count);
  const RocResult roc =
      roc_curve(PredictionScores{scores, cfg.time + 1}, seq.at(cfg.time));

  write_roc_csv(fs::path(cfg.out) / "roc.csv", roc);
  json summary;
  summary["auc"] = roc.auc;
  summary["positives"] = roc.positives;
  summary["negatives"] = roc.negatives;
  summary["samples"] = roc.positives + roc.negatives;
  summary["time"] = cfg.time;
  write_file(fs::path(cfg.out) / "summary.json", summary.dump(2) + "\n");
  return 0;
}

}  // namespace dynsbm::cli
