#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace dynsbm {

using Adjacency = Eigen::MatrixXi;

/// One directed graph snapshot stored as a dense binary adjacency matrix
/// with a zero diagonal. Immutable after construction.
class Snapshot {
 public:
  /// Validates: square, entries in {0,1}, zero diagonal.
  explicit Snapshot(Adjacency adjacency);

  static Snapshot empty(int node_count);

  int node_count() const { return static_cast<int>(adj_.rows()); }
  const Adjacency& adjacency() const { return adj_; }
  bool has_edge(int i, int j) const { return adj_(i, j) != 0; }
  int edge_count() const { return adj_.sum(); }

  /// Directed edges (i, j) in row-major order.
  std::vector<std::pair<int, int>> edges() const;

 private:
  Adjacency adj_;
};

/// Ordered snapshots over a fixed node set.
class SnapshotSequence {
 public:
  SnapshotSequence(int node_count, std::vector<Snapshot> snapshots);

  int node_count() const { return node_count_; }
  int length() const { return static_cast<int>(snapshots_.size()); }
  const Snapshot& at(int t) const { return snapshots_.at(t); }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }

  /// First `length` snapshots.
  SnapshotSequence prefix(int length) const;

 private:
  int node_count_;
  std::vector<Snapshot> snapshots_;
};

/// Node-to-class labels with a fixed class count k.
class ClassAssignment {
 public:
  ClassAssignment(std::vector<int> labels, int k);

  int node_count() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int label(int i) const { return labels_.at(i); }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<int> class_sizes() const;

  /// Copy with one node relabeled.
  ClassAssignment with_label(int node, int cls) const;

  bool operator==(const ClassAssignment& other) const {
    return k_ == other.k_ && labels_ == other.labels_;
  }

 private:
  std::vector<int> labels_;
  int k_;
};

/// Per-block sufficient statistics: observed edge counts m, possible edge
/// counts n (|a||b| off-diagonal, |a|(|a|-1) on-diagonal), and densities
/// y = m/n. Blocks with n == 0 are unobserved; their y entry is NaN and must
/// be gated through observed() rather than used in arithmetic.
struct BlockStats {
  Eigen::MatrixXi m;
  Eigen::MatrixXi n;
  Eigen::MatrixXd y;

  int k() const { return static_cast<int>(m.rows()); }
  bool observed(int a, int b) const { return n(a, b) > 0; }
};

/// Builds BlockStats from raw counts and class sizes (n from the class
/// sizes, y = m/n where defined).
BlockStats stats_from_counts(const Eigen::MatrixXi& m,
                             const std::vector<int>& class_sizes);

BlockStats block_counts(const Snapshot& snapshot,
                        const ClassAssignment& classes);

/// Reads the plain-text edge-list format: one `t i j` record per line,
/// `#` comments, blank lines ignored. Time indices are sorted and re-indexed
/// densely. Duplicate edges collapse; self-edges and out-of-range node
/// indices are rejected with the offending line number.
SnapshotSequence load_snapshots(const std::string& path, int node_count);

/// Reads a class-assignment file: one `i c_i` line per node; every node in
/// 0..node_count-1 must appear exactly once. Pass k = 0 to infer
/// max(c_i) + 1.
ClassAssignment load_classes(const std::string& path, int node_count,
                             int k = 0);

void save_snapshots(const std::string& path, const SnapshotSequence& seq);
void save_classes(const std::string& path, const ClassAssignment& classes);

}  // namespace dynsbm
