#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bcstreams/corpus.hpp"
#include "bcstreams/detail/hash.hpp"
#include "bcstreams/errors.hpp"

namespace bcstreams {

/// Weighted undirected similarity graph over publications. Immutable after
/// construction and safe to share across threads. Nodes are kept sorted by id;
/// each undirected edge is stored once under its canonical (u < v) index pair.
class BCGraph {
 public:
  struct Edge {
    std::uint32_t u, v;  // node indices, u < v
    double w;
  };

  BCGraph() : ids_(std::make_shared<const std::vector<std::string>>()) {}

  /// Builds a graph from explicit weighted edges; node set is derived from the
  /// edges. Rejects self-loops, duplicate pairs and weights outside (0, 1].
  static BCGraph from_edges(const std::vector<std::tuple<std::string, std::string, double>>& edges) {
    std::vector<std::string> ids;
    ids.reserve(edges.size() * 2);
    for (const auto& [a, b, w] : edges) {
      (void)w;
      ids.push_back(a);
      ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    BCGraph g(std::move(ids));
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (const auto& [a, b, w] : edges) {
      if (a == b) throw ValidationError("self-loop on node " + a);
      if (!(w > 0.0) || w > 1.0)
        throw ValidationError("edge weight outside (0,1] between " + a + " and " + b);
      std::uint32_t u = *g.index_of(a);
      std::uint32_t v = *g.index_of(b);
      es.push_back({std::min(u, v), std::max(u, v), w});
    }
    g.finish(std::move(es));
    return g;
  }

  std::size_t node_count() const { return ids_->size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return ids_->empty(); }

  const std::vector<std::string>& node_ids() const { return *ids_; }
  std::shared_ptr<const std::vector<std::string>> node_ids_ptr() const { return ids_; }
  const std::string& node_id(std::uint32_t idx) const { return (*ids_)[idx]; }

  std::optional<std::uint32_t> index_of(std::string_view id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Sum of incident edge weights of a node.
  double strength(std::uint32_t idx) const { return strength_[idx]; }

  /// Total edge weight, each undirected edge counted once.
  double total_weight() const { return total_; }

  const std::vector<Edge>& edges() const { return edges_; }

  /// Neighbors of a node as (neighbor index, weight), sorted by neighbor index.
  std::span<const std::pair<std::uint32_t, double>> neighbors(std::uint32_t idx) const {
    return {adj_.data() + adj_off_[idx], adj_.data() + adj_off_[idx + 1]};
  }

  /// Weight of edge (u, v), or 0 when absent.
  double weight(std::uint32_t u, std::uint32_t v) const {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v,
                               [](const auto& p, std::uint32_t x) { return p.first < x; });
    return (it != nb.end() && it->first == v) ? it->second : 0.0;
  }

  /// Structural fingerprint over sorted nodes, edges and weight bit patterns.
  std::uint64_t digest() const { return digest_; }

 private:
  explicit BCGraph(std::vector<std::string> sorted_ids)
      : ids_(std::make_shared<const std::vector<std::string>>(std::move(sorted_ids))) {
    index_.reserve(ids_->size());
    for (std::uint32_t i = 0; i < ids_->size(); ++i) {
      if (!index_.emplace(std::string_view((*ids_)[i]), i).second)
        throw ValidationError("duplicate node id: " + (*ids_)[i]);
    }
  }

  /// Takes canonical (u < v) edges, sorts them, builds adjacency and caches.
  void finish(std::vector<Edge> es) {
    std::sort(es.begin(), es.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    for (std::size_t i = 1; i < es.size(); ++i) {
      if (es[i].u == es[i - 1].u && es[i].v == es[i - 1].v)
        throw ValidationError("duplicate edge between " + node_id(es[i].u) + " and " + node_id(es[i].v));
    }
    edges_ = std::move(es);

    std::size_t n = ids_->size();
    strength_.assign(n, 0.0);
    std::vector<std::uint32_t> deg(n, 0);
    for (const Edge& e : edges_) {
      strength_[e.u] += e.w;
      strength_[e.v] += e.w;
      total_ += e.w;
      ++deg[e.u];
      ++deg[e.v];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (deg[i] == 0) throw ValidationError("isolated node in graph: " + node_id(static_cast<std::uint32_t>(i)));
    }

    adj_off_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) adj_off_[i + 1] = adj_off_[i] + deg[i];
    adj_.resize(edges_.size() * 2);
    std::vector<std::uint32_t> cursor(adj_off_.begin(), adj_off_.end() - 1);
    for (const Edge& e : edges_) {
      adj_[cursor[e.u]++] = {e.v, e.w};
      adj_[cursor[e.v]++] = {e.u, e.w};
    }
    for (std::size_t i = 0; i < n; ++i)
      std::sort(adj_.begin() + adj_off_[i], adj_.begin() + adj_off_[i + 1]);

    std::uint64_t h = detail::kFnvOffset;
    for (const auto& id : *ids_) {
      h = detail::fnv1a64(std::string_view(id), h);
      h = detail::hash_u64(id.size(), h);
    }
    for (const Edge& e : edges_) {
      h = detail::hash_u64(e.u, h);
      h = detail::hash_u64(e.v, h);
      h = detail::hash_double(e.w, h);
    }
    digest_ = h;
  }

  std::shared_ptr<const std::vector<std::string>> ids_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> adj_off_{0};
  std::vector<std::pair<std::uint32_t, double>> adj_;
  std::vector<double> strength_;
  double total_ = 0.0;
  std::uint64_t digest_ = detail::kFnvOffset;
};

/// Graph plus the publications that held at least one reference but ended up
/// with no qualifying edge (they are excluded from the node set, sorted by id).
struct BcBuildResult {
  BCGraph graph;
  std::vector<std::string> excluded;
};

namespace detail {

/// Shared-reference counting via an inverted index reference -> publications,
/// so only co-citing pairs are ever touched.
inline BcBuildResult build_bc_common(const Corpus& corpus, std::span<const std::uint32_t> pub_idx,
                                     int min_shared_refs) {
  if (min_shared_refs < 1) throw ValidationError("min_shared_refs must be at least 1");

  // Positions are offsets into pub_idx; pairs are keyed (lo << 32 | hi).
  std::unordered_map<std::string_view, std::vector<std::uint32_t>> by_ref;
  for (std::uint32_t pos = 0; pos < pub_idx.size(); ++pos) {
    const Publication& p = corpus.at(pub_idx[pos]);
    for (const std::string& r : p.refs) by_ref[std::string_view(r)].push_back(pos);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> shared;
  for (const auto& [ref, holders] : by_ref) {
    (void)ref;
    for (std::size_t i = 0; i + 1 < holders.size(); ++i)
      for (std::size_t j = i + 1; j < holders.size(); ++j) {
        std::uint64_t key = (static_cast<std::uint64_t>(holders[i]) << 32) | holders[j];
        ++shared[key];
      }
  }

  std::vector<std::tuple<std::string, std::string, double>> edges;
  edges.reserve(shared.size());
  std::vector<bool> connected(pub_idx.size(), false);
  for (const auto& [key, count] : shared) {
    if (static_cast<int>(count) < min_shared_refs) continue;
    std::uint32_t pi = static_cast<std::uint32_t>(key >> 32);
    std::uint32_t pj = static_cast<std::uint32_t>(key & 0xffffffffu);
    const Publication& a = corpus.at(pub_idx[pi]);
    const Publication& b = corpus.at(pub_idx[pj]);
    double w = static_cast<double>(count) /
               std::sqrt(static_cast<double>(a.refs.size()) * static_cast<double>(b.refs.size()));
    edges.emplace_back(a.id, b.id, w);
    connected[pi] = connected[pj] = true;
  }

  BcBuildResult out{BCGraph::from_edges(edges), {}};
  for (std::uint32_t pos = 0; pos < pub_idx.size(); ++pos)
    if (!connected[pos]) out.excluded.push_back(corpus.at(pub_idx[pos]).id);
  std::sort(out.excluded.begin(), out.excluded.end());
  return out;
}

}  // namespace detail

/// Bibliographic-coupling graph over a publication subset: an edge of Kessler
/// weight R_ij / sqrt(R_i R_j) joins every pair sharing at least
/// `min_shared_refs` references. Publications left without an edge are excluded
/// from the node set and reported.
inline BcBuildResult build_bc_graph(const Corpus& corpus, std::span<const std::uint32_t> pub_idx,
                                    int min_shared_refs = 2) {
  return detail::build_bc_common(corpus, pub_idx, min_shared_refs);
}

/// Whole-corpus overload.
inline BcBuildResult build_bc_graph(const Corpus& corpus, int min_shared_refs = 2) {
  std::vector<std::uint32_t> all(corpus.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  return detail::build_bc_common(corpus, all, min_shared_refs);
}

/// Coupling graph over the union of two disjoint publication sets, containing
/// intra-A, intra-B and inter-period edges under the same Kessler rule. A
/// publication isolated within its own period can still enter through a
/// cross-period link.
inline BcBuildResult build_cross_period_graph(const Corpus& corpus,
                                              std::span<const std::uint32_t> pubs_a,
                                              std::span<const std::uint32_t> pubs_b,
                                              int min_shared_refs = 2) {
  std::vector<std::uint32_t> joint(pubs_a.begin(), pubs_a.end());
  joint.insert(joint.end(), pubs_b.begin(), pubs_b.end());
  std::vector<std::uint32_t> sorted = joint;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("cross-period publication sets overlap");
  return detail::build_bc_common(corpus, joint, min_shared_refs);
}

}  // namespace bcstreams
