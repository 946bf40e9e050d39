#include "dynsbm/metrics.hpp"

#include <stdexcept>

namespace dynsbm {

double rand_index(const ClassAssignment& a, const ClassAssignment& b) {
  const int n = a.node_count();
  if (b.node_count() != n) {
    throw std::invalid_argument("partitions cover different node sets");
  }
  if (n < 2) {
    throw std::invalid_argument("rand index needs at least two nodes");
  }
  long long agreements = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool together_a = a.label(i) == a.label(j);
      const bool together_b = b.label(i) == b.label(j);
      if (together_a == together_b) ++agreements;
    }
  }
  const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
  return static_cast<double>(agreements) / static_cast<double>(pairs);
}

double label_agreement(const ClassAssignment& a, const ClassAssignment& b) {
  const int n = a.node_count();
  if (b.node_count() != n) {
    throw std::invalid_argument("assignments cover different node sets");
  }
  if (n == 0) return 1.0;
  int same = 0;
  for (int i = 0; i < n; ++i) {
    if (a.label(i) == b.label(i)) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(n);
}

}  // namespace dynsbm
