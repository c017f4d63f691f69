#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tfec/clustering.hpp"
#include "tfec/features.hpp"
#include "tfec/metrics.hpp"
#include "tfec/types.hpp"

namespace tfec {

// ---------------------------------------------------------------------------
// Sequential forward floating selection: greedily add the feature whose
// inclusion maximizes the cost, then keep removing features while a removal
// strictly improves on the best score ever seen at that subset size.
// ---------------------------------------------------------------------------
struct SelectionStep {
  bool added = true;  // false: removed
  int feature = -1;
  std::string feature_name;
  double score = 0.0;
  int subset_size = 0;  // after the step
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  std::vector<int> best_subset;  // ascending feature indices
  std::vector<std::string> best_subset_names;
  double best_score = 0.0;
};

using SubsetCost = std::function<double(const std::vector<int>&)>;

// Event-level F-score of clustering the given feature columns into two
// groups, with the group->class mapping chosen to favor the subset (both
// mappings scored, better one kept). This is the wrapper cost SFFS drives.
inline SubsetCost cluster_f_cost(const MatrixXd& features,
                                 const std::vector<int>& labels) {
  const int n = static_cast<int>(features.rows());
  if (n < 2) throw ConfigError("cluster_f_cost: need at least 2 events");
  if (static_cast<int>(labels.size()) != n)
    throw ConfigError("cluster_f_cost: labels do not match features");
  int positives = 0;
  for (const int l : labels) {
    if (l != 0 && l != 1) throw ConfigError("cluster_f_cost: labels must be 0/1");
    positives += l;
  }
  if (positives == 0 || positives == n)
    throw ConfigError("cluster_f_cost: labels are a single class");

  return [features, labels](const std::vector<int>& subset) {
    if (subset.empty()) throw ConfigError("cluster_f_cost: empty subset");
    MatrixXd sub(features.rows(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t j = 0; j < subset.size(); ++j)
      sub.col(static_cast<Eigen::Index>(j)) = features.col(subset[j]);
    const ClusterResult clusters = hierarchical_cluster(zscore(sub).z, 2);

    double best = 0.0;
    for (int positive_group = 0; positive_group < 2; ++positive_group) {
      MatchCounts mc;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool predicted = clusters.assignment[i] == positive_group;
        if (predicted && labels[i]) ++mc.tp;
        if (predicted && !labels[i]) ++mc.fp;
        if (!predicted && labels[i]) ++mc.fn;
      }
      best = std::max(best, scores(mc).f_score);
    }
    return best;
  };
}

inline SelectionTrace sffs(int n_features, const SubsetCost& cost,
                           int d_max = 15, double eps = 1e-6) {
  if (n_features < 1) throw ConfigError("sffs: no features");
  if (d_max < 1 || d_max > n_features)
    throw ConfigError("sffs: d_max out of range");

  const auto& names = feature_names();
  auto name_of = [&names, n_features](int f) {
    return n_features == static_cast<int>(names.size())
               ? names[static_cast<std::size_t>(f)]
               : "feature_" + std::to_string(f);
  };

  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<int> subset;
  std::vector<char> in_subset(n_features, 0);
  double current = ninf;
  std::map<int, double> best_at_size;

  SelectionTrace trace;
  trace.best_score = ninf;

  auto record = [&](bool added, int f, double score) {
    SelectionStep step;
    step.added = added;
    step.feature = f;
    step.feature_name = name_of(f);
    step.score = score;
    step.subset_size = static_cast<int>(subset.size());
    trace.steps.push_back(step);
    auto it = best_at_size.find(step.subset_size);
    if (it == best_at_size.end() || score > it->second)
      best_at_size[step.subset_size] = score;
    if (score > trace.best_score) {
      trace.best_score = score;
      trace.best_subset = subset;
      std::sort(trace.best_subset.begin(), trace.best_subset.end());
    }
  };

  auto with = [&subset](int f) {
    std::vector<int> s = subset;
    s.push_back(f);
    std::sort(s.begin(), s.end());
    return s;
  };
  auto without = [&subset](int f) {
    std::vector<int> s;
    for (const int x : subset)
      if (x != f) s.push_back(x);
    return s;
  };

  while (static_cast<int>(subset.size()) < d_max) {
    // Forward: best addition, ties to the lowest (canonical) feature index.
    int add = -1;
    double add_score = ninf;
    for (int f = 0; f < n_features; ++f) {
      if (in_subset[f]) continue;
      const double s = cost(with(f));
      if (s > add_score) {
        add_score = s;
        add = f;
      }
    }
    if (add < 0) break;
    if (!subset.empty() && add_score <= current + eps) break;
    subset.push_back(add);
    std::sort(subset.begin(), subset.end());
    in_subset[add] = 1;
    current = add_score;
    record(true, add, add_score);

    // Floating backward: remove while a removal strictly beats the best
    // score previously reached at the smaller size.
    while (static_cast<int>(subset.size()) > 2) {
      int rem = -1;
      double rem_score = ninf;
      for (const int f : subset) {
        const double s = cost(without(f));
        if (s > rem_score) {
          rem_score = s;
          rem = f;
        }
      }
      const auto it = best_at_size.find(static_cast<int>(subset.size()) - 1);
      const double prior = it == best_at_size.end() ? ninf : it->second;
      if (rem < 0 || rem_score <= prior + eps) break;
      subset.erase(std::find(subset.begin(), subset.end(), rem));
      in_subset[rem] = 0;
      current = rem_score;
      record(false, rem, rem_score);
    }
  }

  for (const int f : trace.best_subset)
    trace.best_subset_names.push_back(name_of(f));
  return trace;
}

// ---------------------------------------------------------------------------
// Point-biserial correlation (Pearson against 0/1 labels) per feature, and
// the feature order sorted by decreasing |r| (ties in canonical order).
// Zero-variance features get r = 0.
// ---------------------------------------------------------------------------
struct CorrelationRanking {
  VectorXd r;               // per feature, catalog order
  std::vector<int> order;   // feature indices, |r| descending
};

inline CorrelationRanking correlation_ranking(const MatrixXd& features,
                                              const std::vector<int>& labels) {
  const Eigen::Index n = features.rows();
  if (n < 2) throw ConfigError("correlation_ranking: need at least 2 events");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ConfigError("correlation_ranking: labels do not match features");

  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw ConfigError("correlation_ranking: labels must be 0/1");
    y[i] = labels[i];
  }
  const VectorXd yc = y.array() - y.mean();
  const double y_ss = yc.squaredNorm();

  CorrelationRanking out;
  out.r = VectorXd::Zero(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const VectorXd xc = features.col(j).array() - features.col(j).mean();
    const double x_ss = xc.squaredNorm();
    if (x_ss > 0 && y_ss > 0) out.r[j] = xc.dot(yc) / std::sqrt(x_ss * y_ss);
  }
  out.order.resize(static_cast<std::size_t>(features.cols()));
  for (std::size_t j = 0; j < out.order.size(); ++j)
    out.order[j] = static_cast<int>(j);
  std::stable_sort(out.order.begin(), out.order.end(), [&out](int a, int b) {
    return std::abs(out.r[a]) > std::abs(out.r[b]);
  });
  return out;
}

}  // namespace tfec
