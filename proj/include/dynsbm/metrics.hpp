#pragma once

#include "dynsbm/net_data.hpp"

namespace dynsbm {

/// Rand index between two partitions of the same node set: the fraction of
/// node pairs on which the partitions agree (together in both, or apart in
/// both). 1 means identical partitions; invariant to label permutations.
double rand_index(const ClassAssignment& a, const ClassAssignment& b);

/// Fraction of nodes carrying the same label in both assignments. Not
/// permutation-invariant; measures label continuity between consecutive
/// fits.
double label_agreement(const ClassAssignment& a, const ClassAssignment& b);

}  // namespace dynsbm
