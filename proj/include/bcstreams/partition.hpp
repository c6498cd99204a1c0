#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bcstreams/bc_graph.hpp"
#include "bcstreams/detail/parallel.hpp"
#include "bcstreams/detail/rng.hpp"
#include "bcstreams/errors.hpp"

namespace bcstreams {

/// Weighted modularity of an assignment given as community id per node index.
/// Computed through the community-aggregated form
///   Q = sum_c [ W_in(c)/Omega - (S_tot(c)/2 Omega)^2 ],
/// which equals the ordered-pair double sum over all (i, j).
inline double modularity(const BCGraph& graph, std::span<const std::uint32_t> assignment) {
  if (graph.empty()) throw ValidationError("modularity of an empty graph");
  if (assignment.size() != graph.node_count())
    throw ValidationError("assignment does not cover all graph nodes");

  // Community ids need not be dense; renumber on the fly.
  std::unordered_map<std::uint32_t, std::uint32_t> dense;
  std::vector<std::uint32_t> comm(assignment.size());
  for (std::uint32_t i = 0; i < assignment.size(); ++i) {
    auto [it, fresh] = dense.emplace(assignment[i], static_cast<std::uint32_t>(dense.size()));
    (void)fresh;
    comm[i] = it->second;
  }
  std::uint32_t k = static_cast<std::uint32_t>(dense.size());
  std::vector<double> internal(k, 0.0), tot(k, 0.0);
  for (const BCGraph::Edge& e : graph.edges())
    if (comm[e.u] == comm[e.v]) internal[comm[e.u]] += e.w;
  for (std::uint32_t i = 0; i < comm.size(); ++i) tot[comm[i]] += graph.strength(i);

  double omega = graph.total_weight();
  double q = 0.0;
  for (std::uint32_t c = 0; c < k; ++c) {
    double frac = tot[c] / (2.0 * omega);
    q += internal[c] / omega - frac * frac;
  }
  return q;
}

/// Map-keyed overload; every graph node must be present.
inline double modularity(const BCGraph& graph,
                         const std::unordered_map<std::string, std::uint32_t>& assignment) {
  std::vector<std::uint32_t> by_index(graph.node_count());
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    auto it = assignment.find(graph.node_id(i));
    if (it == assignment.end())
      throw ValidationError("node missing from assignment: " + graph.node_id(i));
    by_index[i] = it->second;
  }
  return modularity(graph, by_index);
}

/// A partition of one BCGraph into communities 0..k-1. Community ids are
/// canonical: dense and ordered by each community's smallest node id. Value
/// type; shares the node-id array with the graph it was computed on.
class Partition {
 public:
  Partition() : ids_(std::make_shared<const std::vector<std::string>>()) {}

  /// Wraps an externally produced assignment (no seed). The map must cover
  /// every graph node; ids are renumbered to canonical form.
  static Partition from_assignment(const BCGraph& graph,
                                   const std::unordered_map<std::string, std::uint32_t>& assignment) {
    std::vector<std::uint32_t> by_index(graph.node_count());
    for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
      auto it = assignment.find(graph.node_id(i));
      if (it == assignment.end())
        throw ValidationError("node missing from assignment: " + graph.node_id(i));
      by_index[i] = it->second;
    }
    return Partition(graph, std::move(by_index), std::nullopt);
  }

  /// Partition over an explicit node set detached from any coupling graph
  /// (reference partitions, period groupings of nodes that may lack in-period
  /// links). No graph identity and no cached modularity.
  static Partition over_nodes(std::vector<std::string> nodes,
                              const std::unordered_map<std::string, std::uint32_t>& assignment) {
    std::sort(nodes.begin(), nodes.end());
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
      throw ValidationError("duplicate node in partition node set");
    Partition p;
    p.ids_ = std::make_shared<const std::vector<std::string>>(std::move(nodes));
    p.assign_.resize(p.ids_->size());
    for (std::uint32_t i = 0; i < p.ids_->size(); ++i) {
      auto it = assignment.find((*p.ids_)[i]);
      if (it == assignment.end())
        throw ValidationError("node missing from assignment: " + (*p.ids_)[i]);
      p.assign_[i] = it->second;
    }
    p.canonicalize();
    p.index_.reserve(p.ids_->size());
    for (std::uint32_t i = 0; i < p.ids_->size(); ++i)
      p.index_.emplace(std::string_view((*p.ids_)[i]), i);
    return p;
  }

  bool empty() const { return ids_->empty(); }
  std::size_t node_count() const { return ids_->size(); }
  const std::vector<std::string>& node_ids() const { return *ids_; }
  std::span<const std::uint32_t> assignment() const { return assign_; }
  std::uint32_t community_count() const { return k_; }
  double modularity() const { return q_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  std::uint64_t graph_digest() const { return graph_digest_; }

  std::uint32_t community_of_index(std::uint32_t idx) const { return assign_[idx]; }

  std::optional<std::uint32_t> community_of(std::string_view id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return assign_[it->second];
  }

  /// Node count per community.
  std::vector<std::uint32_t> community_sizes() const {
    std::vector<std::uint32_t> sizes(k_, 0);
    for (std::uint32_t c : assign_) ++sizes[c];
    return sizes;
  }

  /// Node indices per community.
  std::vector<std::vector<std::uint32_t>> communities() const {
    std::vector<std::vector<std::uint32_t>> out(k_);
    for (std::uint32_t i = 0; i < assign_.size(); ++i) out[assign_[i]].push_back(i);
    return out;
  }

 private:
  friend Partition louvain(const BCGraph&, std::uint64_t);

  Partition(const BCGraph& graph, std::vector<std::uint32_t> raw, std::optional<std::uint64_t> seed)
      : ids_(graph.node_ids_ptr()), assign_(std::move(raw)), seed_(seed), graph_digest_(graph.digest()) {
    canonicalize();
    q_ = bcstreams::modularity(graph, assign_);
    index_.reserve(ids_->size());
    for (std::uint32_t i = 0; i < ids_->size(); ++i) index_.emplace(std::string_view((*ids_)[i]), i);
  }

  // Renumber communities densely, ordered by smallest member node index
  // (node indices are sorted by id, so this orders by smallest node id).
  void canonicalize() {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (std::uint32_t& c : assign_) {
      auto [it, fresh] = remap.emplace(c, static_cast<std::uint32_t>(remap.size()));
      (void)fresh;
      c = it->second;
    }
    k_ = static_cast<std::uint32_t>(remap.size());
  }

  std::shared_ptr<const std::vector<std::string>> ids_;
  std::vector<std::uint32_t> assign_;
  std::unordered_map<std::string_view, std::uint32_t> index_;
  std::uint32_t k_ = 0;
  double q_ = 0.0;
  std::optional<std::uint64_t> seed_;
  std::uint64_t graph_digest_ = 0;
};

namespace detail {

/// Working graph for the move/aggregate loop. Self-loops hold the ordered-pair
/// internal weight of the collapsed community (twice the once-counted weight),
/// so k_i = loop_i + sum of incident edge weights and 2*Omega is preserved
/// across aggregation levels.
struct LevelGraph {
  std::vector<std::uint32_t> adj_off;
  std::vector<std::pair<std::uint32_t, double>> adj;  // no self entries
  std::vector<double> loop;
  std::vector<double> k;
  double two_omega = 0.0;

  std::size_t size() const { return loop.size(); }
};

inline LevelGraph level_from_bc(const BCGraph& g) {
  LevelGraph lg;
  std::size_t n = g.node_count();
  lg.loop.assign(n, 0.0);
  lg.k.resize(n);
  lg.adj_off.assign(n + 1, 0);
  lg.adj.resize(g.edge_count() * 2);
  std::vector<std::uint32_t> deg(n, 0);
  for (const BCGraph::Edge& e : g.edges()) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (std::size_t i = 0; i < n; ++i) lg.adj_off[i + 1] = lg.adj_off[i] + deg[i];
  std::vector<std::uint32_t> cur(lg.adj_off.begin(), lg.adj_off.end() - 1);
  for (const BCGraph::Edge& e : g.edges()) {
    lg.adj[cur[e.u]++] = {e.v, e.w};
    lg.adj[cur[e.v]++] = {e.u, e.w};
  }
  for (std::size_t i = 0; i < n; ++i) {
    lg.k[i] = g.strength(i);
    lg.two_omega += lg.k[i];
  }
  return lg;
}

struct LevelState {
  std::vector<std::uint32_t> n2c;
  std::vector<double> in;   // ordered-pair internal weight per community
  std::vector<double> tot;  // summed k per community

  double q(double two_omega) const {
    double v = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      double frac = tot[c] / two_omega;
      v += in[c] / two_omega - frac * frac;
    }
    return v;
  }
};

/// One Louvain sweep phase: single-node moves until no strictly improving move
/// remains. Visit order is shuffled once per level from the caller's engine.
/// Ties on the move gain keep the current community, otherwise prefer the
/// lowest community id.
inline bool one_level(const LevelGraph& g, LevelState& st, Rng& rng) {
  std::size_t n = g.size();
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  shuffle_vec(order, rng);

  std::vector<double> w_to_comm(n, 0.0);
  std::vector<std::uint32_t> touched;
  touched.reserve(64);

  bool any_move = false;
  bool moved_in_pass = true;
  while (moved_in_pass) {
    moved_in_pass = false;
    for (std::uint32_t u : order) {
      std::uint32_t c_old = st.n2c[u];

      touched.clear();
      w_to_comm[c_old] = 0.0;
      touched.push_back(c_old);
      for (std::uint32_t e = g.adj_off[u]; e < g.adj_off[u + 1]; ++e) {
        std::uint32_t c = st.n2c[g.adj[e].first];
        if (c != c_old && w_to_comm[c] == 0.0) touched.push_back(c);  // weights are positive
        w_to_comm[c] += g.adj[e].second;
      }

      // Remove u, then score candidate communities relative to each other;
      // the terms constant in the target community cancel in the comparison.
      st.in[c_old] -= 2.0 * w_to_comm[c_old] + g.loop[u];
      st.tot[c_old] -= g.k[u];

      std::uint32_t best_c = c_old;
      double best_gain = w_to_comm[c_old] - st.tot[c_old] * g.k[u] / g.two_omega;
      for (std::uint32_t c : touched) {
        if (c == c_old) continue;
        double gain = w_to_comm[c] - st.tot[c] * g.k[u] / g.two_omega;
        if (gain > best_gain ||
            (gain == best_gain && best_c != c_old && c < best_c)) {
          best_gain = gain;
          best_c = c;
        }
      }

      st.in[best_c] += 2.0 * w_to_comm[best_c] + g.loop[u];
      st.tot[best_c] += g.k[u];
      st.n2c[u] = best_c;
      if (best_c != c_old) {
        moved_in_pass = true;
        any_move = true;
      }

      for (std::uint32_t c : touched) w_to_comm[c] = 0.0;
    }
  }
  return any_move;
}

/// Dense renumbering of the communities in first-appearance (node) order.
inline std::uint32_t dense_renumber(const LevelState& st, std::size_t n_nodes,
                                    std::vector<std::uint32_t>& comm_renum) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  comm_renum.assign(st.in.size(), kUnset);
  std::uint32_t next = 0;
  for (std::uint32_t u = 0; u < n_nodes; ++u) {
    std::uint32_t c = st.n2c[u];
    if (comm_renum[c] == kUnset) comm_renum[c] = next++;
  }
  return next;
}

/// Collapses communities into supernodes, preserving 2*Omega and modularity.
inline LevelGraph aggregate(const LevelGraph& g, const LevelState& st,
                            const std::vector<std::uint32_t>& comm_renum, std::uint32_t next) {
  LevelGraph out;
  out.loop.assign(next, 0.0);
  out.k.assign(next, 0.0);
  out.two_omega = g.two_omega;

  std::vector<std::unordered_map<std::uint32_t, double>> links(next);
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    std::uint32_t cu = comm_renum[st.n2c[u]];
    out.loop[cu] += g.loop[u];
    out.k[cu] += g.k[u];
    for (std::uint32_t e = g.adj_off[u]; e < g.adj_off[u + 1]; ++e) {
      std::uint32_t cv = comm_renum[st.n2c[g.adj[e].first]];
      if (cu == cv)
        out.loop[cu] += g.adj[e].second;  // both directions visited: counts ordered pairs
      else
        links[cu][cv] += g.adj[e].second;
    }
  }

  out.adj_off.assign(next + 1, 0);
  for (std::uint32_t c = 0; c < next; ++c) out.adj_off[c + 1] = out.adj_off[c] + static_cast<std::uint32_t>(links[c].size());
  out.adj.resize(out.adj_off[next]);
  for (std::uint32_t c = 0; c < next; ++c) {
    std::vector<std::pair<std::uint32_t, double>> row(links[c].begin(), links[c].end());
    std::sort(row.begin(), row.end());
    std::copy(row.begin(), row.end(), out.adj.begin() + out.adj_off[c]);
  }
  return out;
}

}  // namespace detail

/// Louvain heuristic on the weighted graph: shuffled single-node moves accepted
/// on strictly positive modularity gain, then community aggregation, repeated
/// until the per-level gain drops below 1e-9. Deterministic for a fixed
/// (graph, seed).
inline Partition louvain(const BCGraph& graph, std::uint64_t seed) {
  if (graph.empty()) throw ValidationError("louvain on an empty graph");

  detail::Rng rng(seed);
  detail::LevelGraph lg = detail::level_from_bc(graph);

  // Composition of per-level assignments, tracked on the original nodes.
  std::vector<std::uint32_t> node_comm(graph.node_count());
  for (std::uint32_t i = 0; i < node_comm.size(); ++i) node_comm[i] = i;

  double prev_q = std::numeric_limits<double>::lowest();
  const double kMinGain = 1e-9;
  while (true) {
    detail::LevelState st;
    st.n2c.resize(lg.size());
    st.in.resize(lg.size());
    st.tot.resize(lg.size());
    for (std::uint32_t i = 0; i < lg.size(); ++i) {
      st.n2c[i] = i;
      st.in[i] = lg.loop[i];
      st.tot[i] = lg.k[i];
    }

    bool moved = detail::one_level(lg, st, rng);
    double q = st.q(lg.two_omega);

    std::vector<std::uint32_t> renum;
    std::uint32_t comms = detail::dense_renumber(st, lg.size(), renum);
    if (moved)
      for (std::uint32_t& c : node_comm) c = renum[st.n2c[c]];

    bool converged = !moved || comms == lg.size() ||
                     (prev_q != std::numeric_limits<double>::lowest() && q - prev_q < kMinGain);
    if (converged) break;
    prev_q = q;
    lg = detail::aggregate(lg, st, renum, comms);
  }

  Partition p(graph, std::move(node_comm), seed);
  return p;
}

/// N independent Louvain runs; run i uses seed base_seed + i. Runs execute
/// concurrently without shared state; result order equals run order.
struct Ensemble {
  std::vector<Partition> partitions;
  std::uint64_t base_seed = 0;
};

inline Ensemble louvain_ensemble(const BCGraph& graph, std::uint32_t n_runs, std::uint64_t base_seed,
                                 unsigned workers = 0) {
  if (n_runs < 1) throw ValidationError("ensemble needs at least one run");
  Ensemble e;
  e.base_seed = base_seed;
  e.partitions.resize(n_runs);
  detail::parallel_for(n_runs, workers,
                       [&](std::size_t i) { e.partitions[i] = louvain(graph, base_seed + i); });
  return e;
}

/// Partition with maximal cached Q; ties broken by lowest run index.
inline const Partition& best_modularity(const Ensemble& ensemble) {
  if (ensemble.partitions.empty()) throw ValidationError("empty ensemble");
  std::size_t best = 0;
  for (std::size_t i = 1; i < ensemble.partitions.size(); ++i)
    if (ensemble.partitions[i].modularity() > ensemble.partitions[best].modularity()) best = i;
  return ensemble.partitions[best];
}

}  // namespace bcstreams
