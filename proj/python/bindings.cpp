#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dynsbm/aposteriori.hpp"
#include "dynsbm/link_predict.hpp"
#include "dynsbm/metrics.hpp"
#include "dynsbm/net_data.hpp"
#include "dynsbm/num.hpp"
#include "dynsbm/state_space.hpp"
#include "dynsbm/static_sbm.hpp"
#include "dynsbm/synth_gen.hpp"

namespace py = pybind11;
using namespace dynsbm;

namespace {

MembershipMode parse_mode(const std::string& mode) {
  if (mode == "static") return MembershipMode::fixed;
  if (mode == "markov") return MembershipMode::markov;
  throw std::invalid_argument("membership_mode must be 'static' or 'markov'");
}

SearchConfig make_search(int max_sweeps, double objective_tolerance,
                         double plugin_epsilon, bool exhaustive) {
  SearchConfig config;
  config.max_sweeps = max_sweeps;
  config.objective_tolerance = objective_tolerance;
  config.plugin_epsilon = plugin_epsilon;
  config.exhaustive = exhaustive;
  return config;
}

SpectralConfig make_spectral(int embedding_rank, int kmeans_restarts,
                             int kmeans_max_iterations, std::uint64_t seed) {
  SpectralConfig config;
  config.embedding_rank = embedding_rank;
  config.kmeans_restarts = kmeans_restarts;
  config.kmeans_max_iterations = kmeans_max_iterations;
  config.seed = seed;
  return config;
}

std::vector<EdgeProbabilityMatrix> wrap_thetas(
    const std::vector<Eigen::MatrixXd>& thetas) {
  std::vector<EdgeProbabilityMatrix> out;
  out.reserve(thetas.size());
  for (const Eigen::MatrixXd& theta : thetas) {
    out.push_back(make_edge_probabilities(theta));
  }
  return out;
}

void export_net_data(py::module_& m) {
  py::class_<Snapshot>(m, "Snapshot")
      .def(py::init<Adjacency>(), py::arg("adjacency"))
      .def_property_readonly("adjacency", &Snapshot::adjacency)
      .def_property_readonly("node_count", &Snapshot::node_count)
      .def_property_readonly("edge_count", &Snapshot::edge_count)
      .def("has_edge", &Snapshot::has_edge, py::arg("i"), py::arg("j"))
      .def("edges", &Snapshot::edges);

  py::class_<SnapshotSequence>(m, "SnapshotSequence")
      .def(py::init([](const std::vector<Adjacency>& mats) {
             if (mats.empty()) {
               throw std::invalid_argument(
                   "pass (node_count, []) to build an empty sequence");
             }
             std::vector<Snapshot> snapshots;
             snapshots.reserve(mats.size());
             for (const Adjacency& mat : mats) snapshots.emplace_back(mat);
             return SnapshotSequence(static_cast<int>(mats.front().rows()),
                                     std::move(snapshots));
           }),
           py::arg("adjacencies"))
      .def(py::init([](int node_count, const std::vector<Adjacency>& mats) {
             std::vector<Snapshot> snapshots;
             snapshots.reserve(mats.size());
             for (const Adjacency& mat : mats) snapshots.emplace_back(mat);
             return SnapshotSequence(node_count, std::move(snapshots));
           }),
           py::arg("node_count"), py::arg("adjacencies"))
      .def("__len__", &SnapshotSequence::length)
      .def("__getitem__",
           [](const SnapshotSequence& seq, int t) {
             if (t < 0 || t >= seq.length()) {
               throw py::index_error("snapshot index out of range");
             }
             return seq.at(t);
           })
      .def_property_readonly("node_count", &SnapshotSequence::node_count)
      .def("prefix", &SnapshotSequence::prefix, py::arg("length"));

  py::class_<ClassAssignment>(m, "ClassAssignment")
      .def(py::init<std::vector<int>, int>(), py::arg("labels"),
           py::arg("k"))
      .def_property_readonly("labels", &ClassAssignment::labels)
      .def_property_readonly("k", &ClassAssignment::k)
      .def_property_readonly("node_count", &ClassAssignment::node_count)
      .def("class_sizes", &ClassAssignment::class_sizes)
      .def("__eq__", &ClassAssignment::operator==);

  py::class_<BlockStats>(m, "BlockStats")
      .def_readonly("m", &BlockStats::m)
      .def_readonly("n", &BlockStats::n)
      .def_readonly("y", &BlockStats::y)
      .def("observed", &BlockStats::observed, py::arg("a"), py::arg("b"));

  m.def("block_counts", &block_counts, py::arg("snapshot"),
        py::arg("classes"));
  m.def("load_snapshots", &load_snapshots, py::arg("path"),
        py::arg("node_count"));
  m.def("load_classes", &load_classes, py::arg("path"), py::arg("node_count"),
        py::arg("k") = 0);
  m.def("save_snapshots", &save_snapshots, py::arg("path"), py::arg("seq"));
  m.def("save_classes", &save_classes, py::arg("path"), py::arg("classes"));
}

void export_static_sbm(py::module_& m) {
  m.def(
      "log_likelihood",
      [](const BlockStats& stats, const Eigen::MatrixXd& theta) {
        return log_likelihood(stats, make_edge_probabilities(theta));
      },
      py::arg("stats"), py::arg("theta"));
  m.def(
      "mle_theta",
      [](const BlockStats& stats, double epsilon) {
        const MleResult result = mle_theta(stats, epsilon);
        return py::make_tuple(result.theta.theta, result.filled);
      },
      py::arg("stats"), py::arg("epsilon") = 1e-4);
  m.def(
      "spectral_init",
      [](const Snapshot& snapshot, int k, int embedding_rank,
         int kmeans_restarts, int kmeans_max_iterations, std::uint64_t seed) {
        const SpectralResult result = spectral_init(
            snapshot, k,
            make_spectral(embedding_rank, kmeans_restarts,
                          kmeans_max_iterations, seed));
        return py::make_tuple(result.assignment, result.converged);
      },
      py::arg("snapshot"), py::arg("k"), py::arg("embedding_rank") = 0,
      py::arg("kmeans_restarts") = 10, py::arg("kmeans_max_iterations") = 100,
      py::arg("seed") = 0);
}

void export_state_space(py::module_& m) {
  m.def("logit", &logit, py::arg("theta"));
  m.def("logistic", &logistic, py::arg("psi"));
  m.def("logistic_scalar", &logistic_scalar, py::arg("x"));

  py::class_<Hyperparameters>(m, "Hyperparameters")
      .def_readonly("mu0", &Hyperparameters::mu0)
      .def_readonly("gamma0", &Hyperparameters::gamma0)
      .def_readonly("gamma", &Hyperparameters::gamma)
      .def_readonly("epsilon", &Hyperparameters::epsilon);
  m.def("make_hyperparameters", &make_hyperparameters, py::arg("mu0"),
        py::arg("gamma0"), py::arg("gamma"), py::arg("epsilon") = 1e-4);
  m.def("isotropic_hyperparameters", &isotropic_hyperparameters, py::arg("k"),
        py::arg("mu0_value"), py::arg("gamma0_scale"), py::arg("gamma_scale"),
        py::arg("epsilon") = 1e-4);

  py::class_<GaussianState>(m, "GaussianState")
      .def_readonly("mean", &GaussianState::mean)
      .def_readonly("covariance", &GaussianState::covariance)
      .def_readonly("time", &GaussianState::time)
      .def_property_readonly("kind", [](const GaussianState& state) {
        return state.kind == StateKind::predicted ? "predicted" : "posterior";
      });

  py::class_<TrackRecord>(m, "TrackRecord")
      .def_readonly("predicted", &TrackRecord::predicted)
      .def_readonly("posterior", &TrackRecord::posterior)
      .def_readonly("theta", &TrackRecord::theta)
      .def_readonly("lower", &TrackRecord::lower)
      .def_readonly("upper", &TrackRecord::upper)
      .def_readonly("innovation_norm", &TrackRecord::innovation_norm);

  m.def(
      "track_apriori",
      [](const SnapshotSequence& seq, const ClassAssignment& classes,
         const Hyperparameters& hp, double confidence_level) {
        return track_apriori(seq, {classes}, hp, confidence_level);
      },
      py::arg("seq"), py::arg("classes"), py::arg("hp"),
      py::arg("confidence_level") = 0.95);
  m.def(
      "track_apriori",
      [](const SnapshotSequence& seq,
         const std::vector<ClassAssignment>& classes,
         const Hyperparameters& hp, double confidence_level) {
        return track_apriori(seq, classes, hp, confidence_level);
      },
      py::arg("seq"), py::arg("classes"), py::arg("hp"),
      py::arg("confidence_level") = 0.95);
}

void export_aposteriori(py::module_& m) {
  py::class_<FitResult>(m, "FitResult")
      .def_readonly("assignment", &FitResult::assignment)
      .def_readonly("predicted", &FitResult::predicted)
      .def_readonly("posterior", &FitResult::posterior)
      .def_readonly("objective", &FitResult::objective)
      .def_readonly("sweeps", &FitResult::sweeps)
      .def_readonly("moves_accepted", &FitResult::moves_accepted)
      .def_readonly("budget_limited", &FitResult::budget_limited);

  m.def(
      "fit_sequence",
      [](const SnapshotSequence& seq, const Hyperparameters& hp, int k,
         int max_sweeps, double objective_tolerance, int embedding_rank,
         int kmeans_restarts, int kmeans_max_iterations, std::uint64_t seed,
         const std::optional<ClassAssignment>& initial) {
        SequenceFitOptions options;
        options.k = k;
        options.search =
            make_search(max_sweeps, objective_tolerance, hp.epsilon, false);
        options.spectral = make_spectral(embedding_rank, kmeans_restarts,
                                         kmeans_max_iterations, seed);
        options.initial = initial;
        return fit_sequence(seq, hp, options);
      },
      py::arg("seq"), py::arg("hp"), py::arg("k") = 2,
      py::arg("max_sweeps") = 50, py::arg("objective_tolerance") = 1e-9,
      py::arg("embedding_rank") = 0, py::arg("kmeans_restarts") = 10,
      py::arg("kmeans_max_iterations") = 100, py::arg("seed") = 0,
      py::arg("initial") = std::nullopt);
}

void export_link_predict(py::module_& m) {
  py::class_<PredictionScores>(m, "PredictionScores")
      .def_readonly("scores", &PredictionScores::scores)
      .def_readonly("target_time", &PredictionScores::target_time);

  py::class_<RocResult>(m, "RocResult")
      .def_property_readonly("points",
                             [](const RocResult& roc) {
                               Eigen::MatrixXd points(roc.points.size(), 3);
                               for (std::size_t i = 0; i < roc.points.size();
                                    ++i) {
                                 points(i, 0) = roc.points[i].threshold;
                                 points(i, 1) = roc.points[i].fpr;
                                 points(i, 2) = roc.points[i].tpr;
                               }
                               return points;
                             })
      .def_readonly("auc", &RocResult::auc)
      .def_readonly("positives", &RocResult::positives)
      .def_readonly("negatives", &RocResult::negatives);

  py::class_<PredictionEvaluation>(m, "PredictionEvaluation")
      .def_readonly("auc_pooled", &PredictionEvaluation::auc_pooled)
      .def_readonly("auc_per_step", &PredictionEvaluation::auc_per_step)
      .def_readonly("roc_pooled", &PredictionEvaluation::roc_pooled);

  py::class_<SequencePrediction>(m, "SequencePrediction")
      .def_readonly("combined", &SequencePrediction::combined)
      .def_readonly("combined_eval", &SequencePrediction::combined_eval)
      .def_readonly("ekf_eval", &SequencePrediction::ekf_eval)
      .def_readonly("ewma_eval", &SequencePrediction::ewma_eval)
      .def_readonly("lambda_", &SequencePrediction::lambda)
      .def_readonly("eta", &SequencePrediction::eta);

  m.def(
      "roc_from_samples",
      [](const std::vector<double>& scores, const std::vector<bool>& labels) {
        return roc_from_samples(scores, labels);
      },
      py::arg("scores"), py::arg("labels"));
  m.def(
      "roc_curve",
      [](const Eigen::MatrixXd& scores, const Snapshot& actual) {
        return roc_curve(PredictionScores{scores, 0}, actual);
      },
      py::arg("scores"), py::arg("actual"));
  m.def(
      "predict_sequence",
      [](const SnapshotSequence& seq,
         const std::vector<Eigen::MatrixXd>& thetas,
         const std::vector<ClassAssignment>& classes, double lambda,
         double eta) {
        return predict_sequence(seq,
                                PredictionInputs{wrap_thetas(thetas), classes},
                                lambda, eta);
      },
      py::arg("seq"), py::arg("thetas"), py::arg("classes"),
      py::arg("lambda_") = 0.5, py::arg("eta") = 0.5);
  m.def(
      "tune_eta",
      [](const SnapshotSequence& seq,
         const std::vector<Eigen::MatrixXd>& thetas,
         const std::vector<ClassAssignment>& classes, double lambda,
         const std::vector<double>& eta_grid, int validation_steps) {
        TuneConfig config;
        config.eta_grid = eta_grid;
        config.validation_steps = validation_steps;
        return tune_eta(seq, PredictionInputs{wrap_thetas(thetas), classes},
                        lambda, config);
      },
      py::arg("seq"), py::arg("thetas"), py::arg("classes"),
      py::arg("lambda_") = 0.5, py::arg("eta_grid") = std::vector<double>{},
      py::arg("validation_steps") = 5);
}

void export_synth_gen(py::module_& m) {
  py::class_<GroundTruth>(m, "GroundTruth")
      .def_readonly("psi", &GroundTruth::psi)
      .def_readonly("theta", &GroundTruth::theta)
      .def_readonly("memberships", &GroundTruth::memberships);

  m.def(
      "generate",
      [](int node_count, int k, int T, const Hyperparameters& hp,
         const std::string& membership_mode, double p_stay,
         std::uint64_t seed) {
        GeneratorSpec spec;
        spec.node_count = node_count;
        spec.k = k;
        spec.T = T;
        spec.hp = hp;
        spec.membership_mode = parse_mode(membership_mode);
        spec.p_stay = p_stay;
        spec.seed = seed;
        GeneratedData data = generate(spec);
        return py::make_tuple(std::move(data.snapshots),
                              std::move(data.truth));
      },
      py::arg("node_count"), py::arg("k"), py::arg("T"), py::arg("hp"),
      py::arg("membership_mode") = "static", py::arg("p_stay") = 1.0,
      py::arg("seed") = 0);
}

void export_metrics(py::module_& m) {
  m.def("rand_index", &rand_index, py::arg("a"), py::arg("b"));
  m.def("label_agreement", &label_agreement, py::arg("a"), py::arg("b"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "dynamic stochastic blockmodel toolkit";
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);
  export_net_data(m);
  export_static_sbm(m);
  export_state_space(m);
  export_aposteriori(m);
  export_link_predict(m);
  export_synth_gen(m);
  export_metrics(m);
}
