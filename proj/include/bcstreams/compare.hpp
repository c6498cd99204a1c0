#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bcstreams/errors.hpp"
#include "bcstreams/matching.hpp"

namespace bcstreams {

/// A partition of publications into named streams; the universe is the key set
/// of the assignment. Sorted map keeps every derived quantity deterministic.
struct StreamPartition {
  std::map<std::string, std::string> assignment;  // publication id -> stream id

  std::size_t size() const { return assignment.size(); }
  bool empty() const { return assignment.empty(); }

  /// Stream id -> member count, ordered by stream id.
  std::map<std::string, std::size_t> stream_sizes() const {
    std::map<std::string, std::size_t> out;
    for (const auto& [pub, s] : assignment) {
      (void)pub;
      ++out[s];
    }
    return out;
  }
};

/// StreamSet membership as a StreamPartition (stream ids rendered in decimal).
inline StreamPartition to_stream_partition(const StreamSet& ss) {
  StreamPartition p;
  for (const auto& [pub, sid] : ss.membership) p.assignment.emplace(pub, std::to_string(sid));
  return p;
}

struct RestrictionReport {
  std::size_t shared = 0;
  std::size_t removed_x = 0;
  std::size_t removed_y = 0;
};

/// Restricts both partitions to the intersection of their universes (streams
/// emptied by the restriction disappear with their members). Errors out when
/// the universes are disjoint.
inline std::pair<StreamPartition, StreamPartition> restrict_to_shared(
    const StreamPartition& x, const StreamPartition& y, RestrictionReport* report = nullptr) {
  StreamPartition rx, ry;
  for (const auto& [pub, s] : x.assignment) {
    auto it = y.assignment.find(pub);
    if (it != y.assignment.end()) {
      rx.assignment.emplace(pub, s);
      ry.assignment.emplace(pub, it->second);
    }
  }
  if (rx.empty()) throw ValidationError("partitions share no publications");
  if (report) {
    report->shared = rx.size();
    report->removed_x = x.size() - rx.size();
    report->removed_y = y.size() - ry.size();
  }
  return {std::move(rx), std::move(ry)};
}

/// Shannon entropy of the stream-size distribution, in nats.
inline double entropy(const StreamPartition& p) {
  if (p.empty()) throw ValidationError("entropy of an empty partition");
  double n = static_cast<double>(p.size());
  double h = 0.0;
  for (const auto& [s, count] : p.stream_sizes()) {
    (void)s;
    double f = static_cast<double>(count) / n;
    h -= f * std::log(f);
  }
  return h;
}

namespace detail {

inline void require_same_universe(const StreamPartition& x, const StreamPartition& y) {
  if (x.size() != y.size())
    throw ValidationError("partitions cover different universes (restrict_to_shared first)");
  auto ix = x.assignment.begin();
  auto iy = y.assignment.begin();
  for (; ix != x.assignment.end(); ++ix, ++iy)
    if (ix->first != iy->first)
      throw ValidationError("partitions cover different universes (restrict_to_shared first)");
}

/// Joint stream-size contingency in one pass over the shared universe.
inline std::map<std::pair<std::string, std::string>, std::size_t> joint_counts(
    const StreamPartition& x, const StreamPartition& y) {
  std::map<std::pair<std::string, std::string>, std::size_t> joint;
  auto ix = x.assignment.begin();
  auto iy = y.assignment.begin();
  for (; ix != x.assignment.end(); ++ix, ++iy) ++joint[{ix->second, iy->second}];
  return joint;
}

}  // namespace detail

/// Mutual information between two partitions of the same universe, in nats:
/// MI = sum_ij p_ij ln(p_ij / (p_i p_j)), empty cells contributing zero.
inline double mutual_information(const StreamPartition& x, const StreamPartition& y) {
  detail::require_same_universe(x, y);
  auto sizes_x = x.stream_sizes();
  auto sizes_y = y.stream_sizes();
  double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [key, count] : detail::joint_counts(x, y)) {
    double p_ij = static_cast<double>(count) / n;
    double p_i = static_cast<double>(sizes_x.at(key.first)) / n;
    double p_j = static_cast<double>(sizes_y.at(key.second)) / n;
    mi += p_ij * std::log(p_ij / (p_i * p_j));
  }
  return mi;
}

/// MI normalized by H(P_X): how much of X is recoverable from Y. 1 whenever Y
/// refines X.
inline double nmi_x(const StreamPartition& x, const StreamPartition& y) {
  double h = entropy(x);
  if (h == 0.0) throw UndefinedMeasureError("NMI_X undefined: H(P_X) = 0");
  return mutual_information(x, y) / h;
}

/// Symmetric NMI: MI / sqrt(H_X H_Y). 1 iff the partitions are identical.
inline double nmi(const StreamPartition& x, const StreamPartition& y) {
  double hx = entropy(x);
  double hy = entropy(y);
  if (hx == 0.0 || hy == 0.0)
    throw UndefinedMeasureError("NMI undefined: a partition has zero entropy");
  return mutual_information(x, y) / std::sqrt(hx * hy);
}

/// Weighted directed bipartite graph between the streams of two partitions.
/// An edge exists iff the streams share articles; the weight out of a node is
/// the shared fraction of its own stream, so outgoing weights sum to 1.
struct BipartiteStreamGraph {
  struct Node {
    std::string id;
    std::size_t size = 0;
  };
  std::vector<Node> left, right;                    // sorted by stream id
  // (left index, right index) -> (w left->right, w right->left)
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, double>> edges;
};

enum class Direction { x_to_y, y_to_x };

inline BipartiteStreamGraph bipartite_graph(const StreamPartition& x, const StreamPartition& y) {
  detail::require_same_universe(x, y);
  BipartiteStreamGraph g;
  std::map<std::string, std::uint32_t> lx, ly;
  for (const auto& [s, count] : x.stream_sizes()) {
    lx.emplace(s, static_cast<std::uint32_t>(g.left.size()));
    g.left.push_back({s, count});
  }
  for (const auto& [s, count] : y.stream_sizes()) {
    ly.emplace(s, static_cast<std::uint32_t>(g.right.size()));
    g.right.push_back({s, count});
  }
  for (const auto& [key, count] : detail::joint_counts(x, y)) {
    std::uint32_t i = lx.at(key.first);
    std::uint32_t j = ly.at(key.second);
    g.edges[{i, j}] = {static_cast<double>(count) / static_cast<double>(g.left[i].size),
                       static_cast<double>(count) / static_cast<double>(g.right[j].size)};
  }
  return g;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

namespace detail {

inline MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  for (double v : values) out.stddev += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(out.stddev / static_cast<double>(values.size()));
  return out;
}

/// Outgoing weights per source node for the requested direction, each list
/// paired with its target stream id, sources ordered by stream id.
inline std::vector<std::vector<std::pair<double, std::string>>> outgoing(
    const BipartiteStreamGraph& g, Direction dir) {
  std::size_t n_src = dir == Direction::x_to_y ? g.left.size() : g.right.size();
  std::vector<std::vector<std::pair<double, std::string>>> out(n_src);
  for (const auto& [key, w] : g.edges) {
    if (dir == Direction::x_to_y)
      out[key.first].emplace_back(w.first, g.right[key.second].id);
    else
      out[key.second].emplace_back(w.second, g.left[key.first].id);
  }
  for (const auto& row : out)
    if (row.empty())
      throw ValidationError("stream without any outgoing edge (universes not shared?)");
  return out;
}

}  // namespace detail

/// Mean and population std-dev, over source streams, of the largest outgoing
/// edge weight: how much of a stream its best counterpart captures.
inline MeanStd first_edge_avg(const BipartiteStreamGraph& g, Direction dir) {
  if (g.left.empty() || g.right.empty()) throw ValidationError("empty bipartite graph");
  std::vector<double> maxima;
  for (const auto& row : detail::outgoing(g, dir)) {
    double m = 0.0;
    for (const auto& [w, id] : row) {
      (void)id;
      m = std::max(m, w);
    }
    maxima.push_back(m);
  }
  return detail::mean_std(maxima);
}

/// Mean and population std-dev, over source streams, of the number of
/// counterpart streams needed to cover `threshold` of a stream's articles
/// (weights taken in descending order, ties by target stream id, inclusive
/// comparison).
inline MeanStd sum80(const BipartiteStreamGraph& g, Direction dir, double threshold = 0.8) {
  if (g.left.empty() || g.right.empty()) throw ValidationError("empty bipartite graph");
  if (!(threshold > 0.0) || threshold > 1.0) throw ValidationError("threshold must be in (0,1]");
  std::vector<double> counts;
  for (auto& row : detail::outgoing(g, dir)) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    double cum = 0.0;
    std::size_t k = 0;
    for (; k < row.size(); ++k) {
      cum += row[k].first;
      if (cum >= threshold) {
        ++k;
        break;
      }
    }
    if (cum < threshold - 1e-9)
      throw ValidationError("outgoing weights do not reach the threshold");
    counts.push_back(static_cast<double>(k));
  }
  return detail::mean_std(counts);
}

}  // namespace bcstreams
