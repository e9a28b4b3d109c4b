#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "macrostate/similarity.hpp"

namespace macrostate {

enum class Linkage { single, complete, average };

Linkage linkage_from_string(std::string_view name);
const char* to_string(Linkage linkage);

/// One agglomeration step. Node ids follow the usual convention: leaves are
/// 0..n-1, the cluster formed by merge i is node n+i. `left` holds the
/// cluster whose lexicographically smallest leaf label is smaller.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;  // leaves in the merged cluster
};

struct Dendrogram {
  std::vector<std::string> leaf_labels;
  std::vector<Merge> merges;  // exactly n-1, heights nondecreasing

  nlohmann::json to_json() const;
};

/// D = 1 - S entrywise with the diagonal forced to zero.
SquareMatrix similarity_to_distance(const SquareMatrix& similarity);

/// Stored-matrix agglomerative clustering. Ties on the minimal linkage
/// distance break toward the lexicographically smallest (left, right)
/// representative-label pair, making the merge order deterministic.
Dendrogram hierarchical_cluster(const SquareMatrix& dist, Linkage linkage);

/// Cluster labels after undoing the k-1 highest merges. Labels are
/// 0..k-1, numbered by each cluster's smallest leaf index.
std::vector<int> cut_tree(const Dendrogram& dendrogram, int k);

/// Mean silhouette coefficient of a labeling; singleton clusters score 0.
double mean_silhouette(const SquareMatrix& dist, std::span<const int> labels);

/// Silhouette-maximizing cluster count over k in [2, k_max]; ties go to the
/// smaller k.
int select_k(const SquareMatrix& dist, const Dendrogram& dendrogram, int k_max);

}  // namespace macrostate
