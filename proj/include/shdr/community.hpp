#pragma once

#include <vector>

#include "shdr/recurrence.hpp"

namespace shdr {

/// Agglomerative greedy modularity maximization on the weighted graph
/// (self-loops ignored). Each step merges the pair with the largest positive
/// modularity gain; ties go to the smallest community indices. Labels are
/// numbered by first occurrence.
std::vector<int> greedy_modularity(const ConsensusGraph& g);

/// Modularity of a labeling on the weighted graph (self-loops ignored).
double modularity(const ConsensusGraph& g, const std::vector<int>& labels);

/// Connected-component labels of an unweighted graph, numbered by first occurrence.
std::vector<int> component_labels(const BinaryGraph& b);

}  // namespace shdr
