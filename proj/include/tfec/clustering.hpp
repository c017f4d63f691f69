#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tfec/types.hpp"

namespace tfec {

// One merge of the agglomeration, in dendrogram node ids: leaves are
// 0..n-1 and the k-th merge (in non-decreasing distance order) creates
// node n+k. node_a < node_b; distance is the Ward linkage (Euclidean
// scale, i.e. the square root of the recursively updated squared form).
struct AgglomerativeMerge {
  int node_a = 0;
  int node_b = 0;
  double distance = 0.0;
};

struct ClusterResult {
  std::vector<int> assignment;   // per-row group id, 0..n_groups-1
  std::vector<AgglomerativeMerge> merge_tree;  // n-1 rows
  int n_groups = 0;
  int hfo_group = -1;                  // filled by label_clusters
  std::vector<double> group_mean_range;  // peak-to-peak of each group mean
};

// Ward hierarchical clustering by repeated greedy merging of the globally
// closest pair. Ties pick the lexicographically smallest slot pair, so the
// result is deterministic. Cached per-row nearest neighbors keep the scan
// near O(n^2) for the monotone Ward objective.
inline ClusterResult hierarchical_cluster(const MatrixXd& points,
                                          int n_groups = 2) {
  const int n = static_cast<int>(points.rows());
  if (n < 2) throw ConfigError("hierarchical_cluster: need at least 2 rows");
  if (n_groups < 1 || n_groups > n)
    throw ConfigError("hierarchical_cluster: invalid group count");

  MatrixXd d2(n, n);  // squared inter-cluster distance, Ward-updated
  for (int i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).squaredNorm();
      d2(i, j) = d;
      d2(j, i) = d;
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<char> active(n, 1);
  std::vector<double> size(n, 1.0);
  std::vector<int> nn_idx(n, -1);
  std::vector<double> nn_dist(n, inf);

  auto rescan = [&](int i) {
    nn_idx[i] = -1;
    nn_dist[i] = inf;
    for (int j = i + 1; j < n; ++j)
      if (active[j] && d2(i, j) < nn_dist[i]) {
        nn_dist[i] = d2(i, j);
        nn_idx[i] = j;
      }
  };
  for (int i = 0; i < n; ++i) rescan(i);

  struct RawMerge {
    int slot_a, slot_b;
    double dist_sq;
  };
  std::vector<RawMerge> raw;
  raw.reserve(n - 1);

  for (int step = 0; step < n - 1; ++step) {
    int a = -1;
    double best = inf;
    for (int i = 0; i < n; ++i)
      if (active[i] && nn_dist[i] < best) {
        best = nn_dist[i];
        a = i;
      }
    const int b = nn_idx[a];
    raw.push_back({a, b, best});

    // Lance-Williams update of the squared Ward distances to the merged
    // cluster, which keeps slot a.
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double sa = size[a], sb = size[b], sk = size[k];
      const double d = ((sa + sk) * d2(a, k) + (sb + sk) * d2(b, k) -
                        sk * best) /
                       (sa + sb + sk);
      d2(a, k) = d;
      d2(k, a) = d;
    }
    size[a] += size[b];
    active[b] = 0;

    rescan(a);
    for (int k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn_idx[k] == a || nn_idx[k] == b) {
        rescan(k);
      } else if (k < a) {
        const double d = d2(k, a);
        if (d < nn_dist[k] || (d == nn_dist[k] && a < nn_idx[k])) {
          nn_dist[k] = d;
          nn_idx[k] = a;
        }
      }
    }
  }

  ClusterResult result;
  result.n_groups = n_groups;

  // Union-find over slots for the cut and for dendrogram node numbering.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  std::vector<int> node_id(n);
  for (int i = 0; i < n; ++i) node_id[i] = i;
  result.merge_tree.reserve(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    if (k > 0 && raw[k].dist_sq < raw[k - 1].dist_sq - 1e-12)
      throw DataError("hierarchical_cluster: non-monotone merge sequence");
    const int ra = find(raw[k].slot_a);
    const int rb = find(raw[k].slot_b);
    AgglomerativeMerge m;
    m.node_a = std::min(node_id[ra], node_id[rb]);
    m.node_b = std::max(node_id[ra], node_id[rb]);
    m.distance = std::sqrt(std::max(0.0, raw[k].dist_sq));
    result.merge_tree.push_back(m);
    if (k < n - n_groups) parent[std::max(ra, rb)] = std::min(ra, rb);
    node_id[std::min(ra, rb)] = n + k;
  }

  // Group ids in order of each group's lowest row index.
  result.assignment.assign(n, -1);
  int next_group = 0;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (result.assignment[root] < 0) result.assignment[root] = next_group++;
    result.assignment[i] = result.assignment[root];
  }
  return result;
}

// Decide which group holds the oscillatory events: average the raw signal
// crops within each group and pick the group whose mean crop has the larger
// peak-to-peak range. Ties go to the smaller group, then to the lower id.
inline void label_clusters(ClusterResult& result, const MatrixXd& crops) {
  const int n = static_cast<int>(crops.rows());
  if (static_cast<int>(result.assignment.size()) != n || crops.cols() == 0)
    throw ConfigError("label_clusters: crops do not match clustering");

  result.group_mean_range.assign(result.n_groups, 0.0);
  std::vector<int> counts(result.n_groups, 0);
  MatrixXd sums = MatrixXd::Zero(result.n_groups, crops.cols());
  for (int i = 0; i < n; ++i) {
    sums.row(result.assignment[i]) += crops.row(i);
    ++counts[result.assignment[i]];
  }
  int best = -1;
  for (int g = 0; g < result.n_groups; ++g) {
    if (counts[g] == 0)
      throw ConfigError("label_clusters: empty group");
    const VectorXd mean = sums.row(g) / static_cast<double>(counts[g]);
    result.group_mean_range[g] = mean.maxCoeff() - mean.minCoeff();
    if (best < 0 || result.group_mean_range[g] > result.group_mean_range[best] ||
        (result.group_mean_range[g] == result.group_mean_range[best] &&
         counts[g] < counts[best]))
      best = g;
  }
  result.hfo_group = best;
}

}  // namespace tfec
