#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcstreams/bc_graph.hpp"
#include "bcstreams/corpus.hpp"
#include "bcstreams/errors.hpp"
#include "bcstreams/partition.hpp"

namespace bcstreams {

/// Link bookkeeping between the clusters of two successive periods, measured on
/// the coupling graph built from both periods together:
///   Omega_ab  raw cross-period weight between clusters a and b
///   omega_ab  Omega_ab / (|C_a| |C_b|), in [0, 1]
///   Omega_a   summed two-period strengths of a cluster's nodes
///   total     Omega_{A,B}, total weight of the two-period graph
struct InterClusterLinks {
  std::vector<std::uint32_t> size_a, size_b;
  std::vector<double> strength_a, strength_b;
  std::vector<double> internal_a, internal_b;  // intra-cluster weight, each edge once
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> cross;
  double total = 0.0;

  std::uint32_t clusters_a() const { return static_cast<std::uint32_t>(size_a.size()); }
  std::uint32_t clusters_b() const { return static_cast<std::uint32_t>(size_b.size()); }

  double omega_raw(std::uint32_t a, std::uint32_t b) const {
    auto it = cross.find({a, b});
    return it == cross.end() ? 0.0 : it->second;
  }

  double omega_norm(std::uint32_t a, std::uint32_t b) const {
    double raw = omega_raw(a, b);
    if (raw == 0.0) return 0.0;
    return raw / (static_cast<double>(size_a[a]) * static_cast<double>(size_b[b]));
  }
};

/// Accumulates all cluster-level quantities in one sweep over the two-period
/// graph. Every graph node must belong to exactly one of the two partitions.
inline InterClusterLinks inter_cluster_links(const Partition& part_a, const Partition& part_b,
                                             const BCGraph& cross_graph) {
  InterClusterLinks out;
  out.size_a = part_a.community_sizes();
  out.size_b = part_b.community_sizes();
  out.strength_a.assign(out.size_a.size(), 0.0);
  out.strength_b.assign(out.size_b.size(), 0.0);
  out.internal_a.assign(out.size_a.size(), 0.0);
  out.internal_b.assign(out.size_b.size(), 0.0);
  out.total = cross_graph.total_weight();

  // side: 0 = A, 1 = B
  std::size_t n = cross_graph.node_count();
  std::vector<unsigned char> side(n);
  std::vector<std::uint32_t> cluster(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    const std::string& id = cross_graph.node_id(v);
    if (auto ca = part_a.community_of(id)) {
      if (part_b.community_of(id))
        throw ValidationError("node in both period partitions: " + id);
      side[v] = 0;
      cluster[v] = *ca;
      out.strength_a[*ca] += cross_graph.strength(v);
    } else if (auto cb = part_b.community_of(id)) {
      side[v] = 1;
      cluster[v] = *cb;
      out.strength_b[*cb] += cross_graph.strength(v);
    } else {
      throw ValidationError("node of the two-period graph missing from both partitions: " + id);
    }
  }

  for (const BCGraph::Edge& e : cross_graph.edges()) {
    if (side[e.u] == side[e.v]) {
      if (cluster[e.u] == cluster[e.v]) {
        (side[e.u] == 0 ? out.internal_a : out.internal_b)[cluster[e.u]] += e.w;
      }
    } else {
      std::uint32_t a = side[e.u] == 0 ? cluster[e.u] : cluster[e.v];
      std::uint32_t b = side[e.u] == 0 ? cluster[e.v] : cluster[e.u];
      out.cross[{a, b}] += e.w;
    }
  }
  return out;
}

/// Matching score delta Q = Omega_ab - Omega_a Omega_b / (2 Omega_{A,B}):
/// Omega_{A,B} times the modularity change on the two-period graph when
/// clusters a and b are merged, starting from the union partition.
inline double delta_q(const InterClusterLinks& links, std::uint32_t a, std::uint32_t b) {
  return links.omega_raw(a, b) -
         links.strength_a[a] * links.strength_b[b] / (2.0 * links.total);
}

/// Outcome of matching the clusters of two successive periods. A pair is a
/// mutual best match; a split is a cluster that is not the successor of its
/// predecessor; a merge is a cluster that is not the predecessor of its
/// successor.
struct MatchResult {
  struct Link {
    std::uint32_t a, b;
    double dq, omega;  // omega is the normalized cross weight omega_ab
  };

  std::vector<std::optional<std::uint32_t>> successor;    // per A-cluster
  std::vector<std::optional<std::uint32_t>> predecessor;  // per B-cluster
  std::vector<Link> pairs;
  std::vector<Link> splits;
  std::vector<Link> merges;
};

/// Classifies pairs, splits and merges from precomputed links. Only candidate
/// pairs with omega_ab > theta participate. Delta-Q ties break on larger
/// omega_ab, then on smaller opposite cluster id; a best match is kept even
/// when its delta Q is non-positive (the gate is theta only).
inline MatchResult match_from_links(const InterClusterLinks& links, double theta = 1e-6) {
  if (theta <= 0.0) throw ValidationError("theta must be positive");
  MatchResult out;
  out.successor.assign(links.clusters_a(), std::nullopt);
  out.predecessor.assign(links.clusters_b(), std::nullopt);

  struct Best {
    bool set = false;
    std::uint32_t other = 0;
    double dq = 0.0, omega = 0.0;
  };
  std::vector<Best> best_b_for_a(links.clusters_a());
  std::vector<Best> best_a_for_b(links.clusters_b());

  auto consider = [](Best& cur, std::uint32_t other, double dq, double omega) {
    if (!cur.set || dq > cur.dq || (dq == cur.dq && omega > cur.omega) ||
        (dq == cur.dq && omega == cur.omega && other < cur.other)) {
      cur = {true, other, dq, omega};
    }
  };

  for (const auto& [key, raw] : links.cross) {
    (void)raw;
    auto [a, b] = key;
    double omega = links.omega_norm(a, b);
    if (!(omega > theta)) continue;
    double dq = delta_q(links, a, b);
    consider(best_b_for_a[a], b, dq, omega);
    consider(best_a_for_b[b], a, dq, omega);
  }

  for (std::uint32_t a = 0; a < links.clusters_a(); ++a)
    if (best_b_for_a[a].set) out.successor[a] = best_b_for_a[a].other;
  for (std::uint32_t b = 0; b < links.clusters_b(); ++b)
    if (best_a_for_b[b].set) out.predecessor[b] = best_a_for_b[b].other;

  for (std::uint32_t b = 0; b < links.clusters_b(); ++b) {
    if (!out.predecessor[b]) continue;
    std::uint32_t a = *out.predecessor[b];
    MatchResult::Link link{a, b, delta_q(links, a, b), links.omega_norm(a, b)};
    if (out.successor[a] && *out.successor[a] == b)
      out.pairs.push_back(link);
    else
      out.splits.push_back(link);
  }
  for (std::uint32_t a = 0; a < links.clusters_a(); ++a) {
    if (!out.successor[a]) continue;
    std::uint32_t b = *out.successor[a];
    if (!(out.predecessor[b] && *out.predecessor[b] == a))
      out.merges.push_back({a, b, delta_q(links, a, b), links.omega_norm(a, b)});
  }
  return out;
}

/// Convenience wrapper computing the links first.
inline MatchResult match_periods(const Partition& part_a, const Partition& part_b,
                                 const BCGraph& cross_graph, double theta = 1e-6) {
  return match_from_links(inter_cluster_links(part_a, part_b, cross_graph), theta);
}

/// Modularity of the two-period graph under the union partition with every
/// matched pair merged into one community (unpaired clusters stay as they are).
inline double combined_modularity(const InterClusterLinks& links, const MatchResult& match) {
  if (links.total <= 0.0) throw ValidationError("combined modularity of an edgeless graph");
  double omega = links.total;
  double q = 0.0;
  for (std::uint32_t a = 0; a < links.clusters_a(); ++a) {
    double frac = links.strength_a[a] / (2.0 * omega);
    q += links.internal_a[a] / omega - frac * frac;
  }
  for (std::uint32_t b = 0; b < links.clusters_b(); ++b) {
    double frac = links.strength_b[b] / (2.0 * omega);
    q += links.internal_b[b] / omega - frac * frac;
  }
  // Pairs are disjoint, so each merge contributes its delta Q independently.
  for (const MatchResult::Link& p : match.pairs) q += p.dq / omega;
  return q;
}

enum class EventType { split, merge };

inline const char* to_string(EventType t) { return t == EventType::split ? "split" : "merge"; }

/// A dynamical event at the boundary between windows `boundary - 1` and
/// `boundary`. Carries the delta Q and omega_ab of the non-paired best-match
/// link for downstream display weighting.
struct StreamEvent {
  int boundary = 0;
  EventType type = EventType::split;
  int from_stream = 0;
  int to_stream = 0;
  double dq = 0.0;
  double omega = 0.0;
};

struct StreamChainLink {
  int window = 0;
  std::uint32_t cluster = 0;
};

/// Temporal meta-clusters: each stream is a chain of per-window clusters (at
/// most one per window), every partitioned publication belongs to exactly one
/// stream.
struct StreamSet {
  std::vector<TimeWindow> windows;
  std::vector<std::vector<StreamChainLink>> streams;    // stream id = index
  std::map<std::string, int> membership;                // publication id -> stream id
  std::vector<StreamEvent> events;
  std::map<int, std::map<int, std::string>> labels;     // stream -> window -> label
};

/// Chains paired clusters across successive windows into streams. A cluster
/// with no paired predecessor starts a stream; one with no paired successor
/// ends it. match_results[k] must link windows k and k+1.
inline StreamSet build_streams(const std::vector<MatchResult>& match_results,
                               const std::vector<Partition>& partitions,
                               const std::vector<TimeWindow>& windows) {
  if (partitions.size() != windows.size())
    throw ValidationError("partitions and windows misaligned");
  if (!windows.empty() && match_results.size() + 1 != windows.size())
    throw ValidationError("match results and windows misaligned");
  for (std::size_t k = 0; k < match_results.size(); ++k) {
    if (match_results[k].successor.size() != partitions[k].community_count() ||
        match_results[k].predecessor.size() != partitions[k + 1].community_count())
      throw ValidationError("match result at boundary " + std::to_string(k + 1) +
                            " inconsistent with window partitions");
  }

  StreamSet out;
  out.windows = windows;

  // stream id of each (window, cluster)
  std::vector<std::vector<int>> stream_of(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    stream_of[w].assign(partitions[w].community_count(), -1);
    for (std::uint32_t c = 0; c < partitions[w].community_count(); ++c) {
      int sid = -1;
      if (w > 0) {
        for (const MatchResult::Link& p : match_results[w - 1].pairs) {
          if (p.b == c) {
            sid = stream_of[w - 1][p.a];
            break;
          }
        }
      }
      if (sid < 0) {
        sid = static_cast<int>(out.streams.size());
        out.streams.emplace_back();
      }
      stream_of[w][c] = sid;
      out.streams[static_cast<std::size_t>(sid)].push_back({static_cast<int>(w), c});
    }
  }

  for (std::size_t w = 0; w < windows.size(); ++w) {
    const Partition& p = partitions[w];
    for (std::uint32_t i = 0; i < p.node_count(); ++i)
      out.membership.emplace(p.node_ids()[i], stream_of[w][p.community_of_index(i)]);
  }

  for (std::size_t k = 0; k < match_results.size(); ++k) {
    int boundary = static_cast<int>(k) + 1;
    for (const MatchResult::Link& s : match_results[k].splits)
      out.events.push_back({boundary, EventType::split, stream_of[k][s.a], stream_of[k + 1][s.b],
                            s.dq, s.omega});
    for (const MatchResult::Link& m : match_results[k].merges)
      out.events.push_back({boundary, EventType::merge, stream_of[k][m.a], stream_of[k + 1][m.b],
                            m.dq, m.omega});
  }
  std::sort(out.events.begin(), out.events.end(), [](const StreamEvent& x, const StreamEvent& y) {
    return std::tie(x.boundary, x.type, x.from_stream, x.to_stream) <
           std::tie(y.boundary, y.type, y.from_stream, y.to_stream);
  });
  return out;
}

/// Attaches per-window labels: the most frequent label token among a stream's
/// publications in that window, ties broken lexicographically, the stream id as
/// fallback when no publication carries a label.
inline StreamSet label_streams(StreamSet streams, const Corpus& corpus) {
  // (stream, window) -> label -> count
  std::map<std::pair<int, int>, std::map<std::string, std::uint32_t>> counts;
  for (const auto& [pub_id, sid] : streams.membership) {
    auto idx = corpus.index_of(pub_id);
    if (!idx) continue;
    const Publication& p = corpus.at(*idx);
    int w = -1;
    for (const TimeWindow& tw : streams.windows)
      if (tw.contains(p.year)) {
        w = tw.index;
        break;
      }
    if (w < 0) continue;
    if (!p.label.empty()) ++counts[{sid, w}][p.label];
    else counts[{sid, w}];  // mark the cell so the fallback label is emitted
  }

  streams.labels.clear();
  for (const auto& [key, label_counts] : counts) {
    auto [sid, w] = key;
    std::string best = std::to_string(sid);
    std::uint32_t best_n = 0;
    for (const auto& [label, n] : label_counts) {
      if (n > best_n) {  // map order makes this pick the lexicographically smallest on ties
        best = label;
        best_n = n;
      }
    }
    streams.labels[sid][w] = best;
  }
  return streams;
}

}  // namespace bcstreams
