#include "macrostate/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "macrostate/error.hpp"

namespace macrostate {

Linkage linkage_from_string(std::string_view name) {
  if (name == "single") return Linkage::single;
  if (name == "complete") return Linkage::complete;
  if (name == "average") return Linkage::average;
  fail(ErrorKind::argument, "unknown linkage '" + std::string(name) +
                                "' (expected single, complete, or average)");
}

const char* to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
  }
  return "?";
}

nlohmann::json Dendrogram::to_json() const {
  nlohmann::json merges_json = nlohmann::json::array();
  for (const auto& m : merges) {
    merges_json.push_back(nlohmann::json{
        {"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  }
  return nlohmann::json{{"leaf_labels", leaf_labels}, {"merges", merges_json}};
}

SquareMatrix similarity_to_distance(const SquareMatrix& similarity) {
  if (similarity.kind() != MatrixKind::similarity) {
    fail(ErrorKind::kind, "similarity_to_distance needs a similarity matrix");
  }
  const std::size_t n = similarity.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(similarity.at(i, i) - 1.0) > 1e-9) {
      fail(ErrorKind::kind, "similarity diagonal departs from 1 at '" + similarity.labels()[i] +
                                "'");
    }
  }
  std::vector<double> entries(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d = 1.0 - similarity.at(i, j);
      if (d < 0.0 && d > -1e-12) d = 0.0;  // rounding guard near perfect similarity
      entries[i * n + j] = d;
    }
  }
  return SquareMatrix::distance(similarity.labels(), std::move(entries));
}

Dendrogram hierarchical_cluster(const SquareMatrix& dist, Linkage linkage) {
  if (dist.kind() != MatrixKind::distance) {
    fail(ErrorKind::kind, "hierarchical_cluster needs a distance matrix");
  }
  const std::size_t n = dist.size();
  if (n < 2) fail(ErrorKind::insufficient_data, "clustering needs at least 2 items");
  for (double v : dist.entries()) {
    if (std::isnan(v)) fail(ErrorKind::data, "NaN entry in distance matrix");
  }

  // Stored-matrix agglomeration with Lance-Williams updates. Slot b dies into
  // slot a on each merge; `rep` keeps the lexicographically smallest leaf
  // label of the cluster, which drives the deterministic tie-break.
  std::vector<double> d(dist.entries());
  std::vector<bool> alive(n, true);
  std::vector<int> node(n);
  std::vector<int> size(n, 1);
  std::vector<std::string> rep(dist.labels());
  for (std::size_t i = 0; i < n; ++i) node[i] = static_cast<int>(i);

  Dendrogram out;
  out.leaf_labels = dist.labels();
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = n, bj = n;
    const std::string* blo = nullptr;
    const std::string* bhi = nullptr;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        double v = d[i * n + j];
        const std::string& lo = std::min(rep[i], rep[j]);
        const std::string& hi = std::max(rep[i], rep[j]);
        bool better = v < best;
        if (!better && v == best && blo != nullptr) {
          better = std::tie(lo, hi) < std::tie(*blo, *bhi);
        }
        if (better) {
          best = v;
          bi = i;
          bj = j;
          blo = &lo;
          bhi = &hi;
        }
      }
    }

    // Lance-Williams distance from the merged cluster to each survivor.
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      double dik = d[bi * n + k];
      double djk = d[bj * n + k];
      double merged;
      switch (linkage) {
        case Linkage::single: merged = std::min(dik, djk); break;
        case Linkage::complete: merged = std::max(dik, djk); break;
        case Linkage::average:
        default:
          merged = (size[bi] * dik + size[bj] * djk) / static_cast<double>(size[bi] + size[bj]);
          break;
      }
      d[bi * n + k] = merged;
      d[k * n + bi] = merged;
    }

    Merge m;
    if (rep[bi] <= rep[bj]) {
      m.left = node[bi];
      m.right = node[bj];
    } else {
      m.left = node[bj];
      m.right = node[bi];
    }
    m.height = best;
    m.size = size[bi] + size[bj];
    out.merges.push_back(m);

    node[bi] = static_cast<int>(n + step);
    size[bi] += size[bj];
    if (rep[bj] < rep[bi]) rep[bi] = rep[bj];
    alive[bj] = false;
  }
  return out;
}

std::vector<int> cut_tree(const Dendrogram& dendrogram, int k) {
  const int n = static_cast<int>(dendrogram.leaf_labels.size());
  if (k < 1 || k > n) {
    fail(ErrorKind::argument, "cluster count " + std::to_string(k) + " outside [1, " +
                                  std::to_string(n) + "]");
  }
  // Replay the first n-k merges; the k surviving subtrees are the clusters.
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n) + dendrogram.merges.size());
  std::vector<bool> consumed(members.size(), false);
  for (int i = 0; i < n; ++i) members[i] = {i};
  const int applied = n - k;
  for (int i = 0; i < applied; ++i) {
    const Merge& m = dendrogram.merges[i];
    auto& dst = members[n + i];
    dst = members[m.left];
    dst.insert(dst.end(), members[m.right].begin(), members[m.right].end());
    consumed[m.left] = true;
    consumed[m.right] = true;
  }

  std::vector<int> roots;
  for (int i = 0; i < n + applied; ++i) {
    if (!consumed[i] && !members[i].empty()) roots.push_back(i);
  }
  // Number clusters by their smallest leaf index so labels are deterministic.
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    return *std::min_element(members[a].begin(), members[a].end()) <
           *std::min_element(members[b].begin(), members[b].end());
  });

  std::vector<int> labels(n, -1);
  for (std::size_t c = 0; c < roots.size(); ++c) {
    for (int leaf : members[roots[c]]) labels[leaf] = static_cast<int>(c);
  }
  return labels;
}

double mean_silhouette(const SquareMatrix& dist, std::span<const int> labels) {
  const std::size_t n = dist.size();
  if (labels.size() != n) fail(ErrorKind::dimension, "label count does not match matrix size");
  int k = 0;
  for (int label : labels) k = std::max(k, label + 1);
  if (k < 2) return 0.0;

  std::vector<int> cluster_size(k, 0);
  for (int label : labels) ++cluster_size[label];

  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    const int ci = labels[i];
    if (cluster_size[ci] <= 1) continue;  // singleton scores 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[labels[j]] += dist.at(i, j);
    }
    const double a = sums[ci] / (cluster_size[ci] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == ci || cluster_size[c] == 0) continue;
      b = std::min(b, sums[c] / cluster_size[c]);
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

int select_k(const SquareMatrix& dist, const Dendrogram& dendrogram, int k_max) {
  const int n = static_cast<int>(dist.size());
  if (n < 3) fail(ErrorKind::insufficient_data, "cluster-count selection needs at least 3 items");
  if (k_max < 2 || k_max > n - 1) {
    fail(ErrorKind::argument, "k_max " + std::to_string(k_max) + " outside [2, " +
                                  std::to_string(n - 1) + "]");
  }
  int best_k = 2;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= k_max; ++k) {
    std::vector<int> labels = cut_tree(dendrogram, k);
    double score = mean_silhouette(dist, labels);
    if (score > best_score) {  // strict: ties keep the smaller k
      best_score = score;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace macrostate
