#include "dynsbm/net_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dynsbm {

Snapshot::Snapshot(Adjacency adjacency) : adj_(std::move(adjacency)) {
  if (adj_.rows() != adj_.cols()) {
    throw std::invalid_argument("adjacency matrix must be square");
  }
  for (Eigen::Index i = 0; i < adj_.rows(); ++i) {
    if (adj_(i, i) != 0) {
      throw std::invalid_argument("self-edge at node " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < adj_.cols(); ++j) {
      if (adj_(i, j) != 0 && adj_(i, j) != 1) {
        throw std::invalid_argument("adjacency entries must be 0 or 1");
      }
    }
  }
}

Snapshot Snapshot::empty(int node_count) {
  return Snapshot(Adjacency::Zero(node_count, node_count));
}

std::vector<std::pair<int, int>> Snapshot::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count());
  for (int i = 0; i < node_count(); ++i) {
    for (int j = 0; j < node_count(); ++j) {
      if (adj_(i, j) != 0) out.emplace_back(i, j);
    }
  }
  return out;
}

SnapshotSequence::SnapshotSequence(int node_count,
                                   std::vector<Snapshot> snapshots)
    : node_count_(node_count), snapshots_(std::move(snapshots)) {
  if (node_count_ <= 0) {
    throw std::invalid_argument("node_count must be positive");
  }
  for (const Snapshot& s : snapshots_) {
    if (s.node_count() != node_count_) {
      throw std::invalid_argument("all snapshots must share the node set");
    }
  }
}

SnapshotSequence SnapshotSequence::prefix(int length) const {
  if (length < 0 || length > this->length()) {
    throw std::invalid_argument("prefix length out of range");
  }
  return SnapshotSequence(
      node_count_, std::vector<Snapshot>(snapshots_.begin(),
                                         snapshots_.begin() + length));
}

ClassAssignment::ClassAssignment(std::vector<int> labels, int k)
    : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw std::invalid_argument("class count k must be >= 1");
  if (labels_.empty()) {
    throw std::invalid_argument("assignment must cover at least one node");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k_) {
      throw std::invalid_argument("label out of range at node " +
                                  std::to_string(i));
    }
  }
}

std::vector<int> ClassAssignment::class_sizes() const {
  std::vector<int> sizes(k_, 0);
  for (int c : labels_) ++sizes[c];
  return sizes;
}

ClassAssignment ClassAssignment::with_label(int node, int cls) const {
  std::vector<int> labels = labels_;
  labels.at(node) = cls;
  return ClassAssignment(std::move(labels), k_);
}

BlockStats stats_from_counts(const Eigen::MatrixXi& m,
                             const std::vector<int>& class_sizes) {
  const int k = static_cast<int>(class_sizes.size());
  if (m.rows() != k || m.cols() != k) {
    throw std::invalid_argument("count matrix shape does not match k");
  }
  BlockStats stats;
  stats.m = m;
  stats.n.resize(k, k);
  stats.y.resize(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      stats.n(a, b) = (a == b) ? class_sizes[a] * (class_sizes[a] - 1)
                               : class_sizes[a] * class_sizes[b];
      if (stats.m(a, b) < 0 || stats.m(a, b) > stats.n(a, b)) {
        throw std::invalid_argument("observed count outside [0, possible]");
      }
      stats.y(a, b) = stats.n(a, b) > 0
                          ? static_cast<double>(stats.m(a, b)) / stats.n(a, b)
                          : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return stats;
}

BlockStats block_counts(const Snapshot& snapshot,
                        const ClassAssignment& classes) {
  if (snapshot.node_count() != classes.node_count()) {
    throw std::invalid_argument(
        "snapshot and class assignment cover different node sets");
  }
  const int k = classes.k();
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(k, k);
  const Adjacency& w = snapshot.adjacency();
  for (int i = 0; i < snapshot.node_count(); ++i) {
    for (int j = 0; j < snapshot.node_count(); ++j) {
      if (w(i, j) != 0) ++m(classes.label(i), classes.label(j));
    }
  }
  return stats_from_counts(m, classes.class_sizes());
}

namespace {

// Splits a line into whitespace-separated nonnegative integer fields.
bool parse_int_fields(const std::string& line, std::vector<long>& fields) {
  fields.clear();
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      long v = std::stol(token, &used);
      if (used != token.size() || v < 0) return false;
      fields.push_back(v);
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

SnapshotSequence load_snapshots(const std::string& path, int node_count) {
  if (node_count <= 0) {
    throw std::invalid_argument("node_count must be positive");
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open edge list: " + path);

  std::map<long, Adjacency> by_time;
  std::string line;
  std::vector<long> fields;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    if (!parse_int_fields(line, fields) || fields.size() != 3) {
      throw std::invalid_argument("parse error at line " +
                                  std::to_string(line_no) +
                                  ": expected `t i j`");
    }
    const long t = fields[0], i = fields[1], j = fields[2];
    if (i >= node_count || j >= node_count) {
      throw std::out_of_range("node index out of range at line " +
                              std::to_string(line_no));
    }
    if (i == j) {
      throw std::invalid_argument("self-edge at line " +
                                  std::to_string(line_no));
    }
    auto [it, inserted] =
        by_time.try_emplace(t, Adjacency::Zero(node_count, node_count));
    it->second(i, j) = 1;
  }

  std::vector<Snapshot> snapshots;
  snapshots.reserve(by_time.size());
  for (auto& [t, adj] : by_time) snapshots.emplace_back(std::move(adj));
  return SnapshotSequence(node_count, std::move(snapshots));
}

ClassAssignment load_classes(const std::string& path, int node_count, int k) {
  if (node_count <= 0) {
    throw std::invalid_argument("node_count must be positive");
  }
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open class file: " + path);

  std::vector<int> labels(node_count, -1);
  std::string line;
  std::vector<long> fields;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    if (!parse_int_fields(line, fields) || fields.size() != 2) {
      throw std::invalid_argument("parse error at line " +
                                  std::to_string(line_no) +
                                  ": expected `i c_i`");
    }
    const long i = fields[0], c = fields[1];
    if (i >= node_count) {
      throw std::out_of_range("node index out of range at line " +
                              std::to_string(line_no));
    }
    if (labels[i] != -1) {
      throw std::invalid_argument("node listed twice at line " +
                                  std::to_string(line_no));
    }
    labels[i] = static_cast<int>(c);
  }
  for (int i = 0; i < node_count; ++i) {
    if (labels[i] == -1) {
      throw std::invalid_argument("node " + std::to_string(i) +
                                  " missing from class file");
    }
  }
  if (k == 0) k = *std::max_element(labels.begin(), labels.end()) + 1;
  return ClassAssignment(std::move(labels), k);
}

void save_snapshots(const std::string& path, const SnapshotSequence& seq) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write edge list: " + path);
  out << "# directed edge list: t i j\n";
  for (int t = 0; t < seq.length(); ++t) {
    for (const auto& [i, j] : seq.at(t).edges()) {
      out << t << ' ' << i << ' ' << j << '\n';
    }
  }
}

void save_classes(const std::string& path, const ClassAssignment& classes) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write class file: " + path);
  for (int i = 0; i < classes.node_count(); ++i) {
    out << i << ' ' << classes.label(i) << '\n';
  }
}

}  // namespace dynsbm
