#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bcstreams/bc_graph.hpp"
#include "bcstreams/corpus.hpp"
#include "bcstreams/detail/parallel.hpp"
#include "bcstreams/errors.hpp"
#include "bcstreams/matching.hpp"
#include "bcstreams/partition.hpp"

namespace bcstreams {

enum class Algorithm { ga, gpa, bmla, bclc };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::ga: return "ga";
    case Algorithm::gpa: return "gpa";
    case Algorithm::bmla: return "bmla";
    case Algorithm::bclc: return "bclc";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "ga") return Algorithm::ga;
  if (name == "gpa") return Algorithm::gpa;
  if (name == "bmla") return Algorithm::bmla;
  if (name == "bclc") return Algorithm::bclc;
  return std::nullopt;
}

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::bclc;
  int delta_t = 5;
  std::uint32_t n_runs = 100;
  std::uint64_t base_seed = 0;
  double theta = 1e-6;
  int min_shared_refs = 2;
  unsigned workers = 0;  // 0 = all hardware threads

  void validate() const {
    if (delta_t < 1) throw ValidationError("window width must be at least 1 year");
    if (n_runs < 1) throw ValidationError("n_runs must be at least 1");
    if (!(theta > 0.0)) throw ValidationError("theta must be positive");
    if (min_shared_refs < 1) throw ValidationError("min_shared_refs must be at least 1");
  }
};

struct WindowReport {
  int window = 0;
  TimeWindow span;
  std::size_t population = 0;                 // publications dated in the window
  std::optional<std::size_t> graph_nodes;     // kept in the per-window graph
  std::optional<std::size_t> excluded;        // population - graph_nodes
  std::optional<double> q;                    // chosen partition modularity
  std::optional<std::uint64_t> seed;          // seed of the chosen run
  std::optional<std::size_t> in_global;       // GPA: window pubs present in the global graph
  std::optional<double> loss_fraction;        // GPA: (in_global - kept) / in_global
};

struct BoundaryReport {
  int boundary = 0;  // index of the later window
  std::optional<double> combined_q;
  std::size_t pairs = 0, splits = 0, merges = 0;
  std::uint64_t evaluations = 0;
  std::optional<std::size_t> cross_origin_pairs;       // GPA: pairs joining different origin streams
  std::size_t nonpositive_dq_pairs = 0;                // accepted pairs with delta Q <= 0
};

struct RunReport {
  std::string algorithm;
  std::optional<double> global_q;
  std::optional<std::uint64_t> global_seed;
  std::size_t global_nodes = 0;
  std::size_t global_excluded = 0;
  std::vector<WindowReport> windows;
  std::vector<BoundaryReport> boundaries;
  std::uint64_t matching_evaluations = 0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
};

struct DetectionResult {
  StreamSet streams;
  RunReport report;
};

namespace detail {

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::vector<TimeWindow> windows_of(const std::vector<WindowSlice>& slices) {
  std::vector<TimeWindow> out;
  out.reserve(slices.size());
  for (const WindowSlice& s : slices) out.push_back(s.window);
  return out;
}

inline std::vector<std::uint32_t> corpus_indices(const Corpus& corpus, const BCGraph& graph) {
  std::vector<std::uint32_t> out;
  out.reserve(graph.node_count());
  for (const std::string& id : graph.node_ids()) out.push_back(*corpus.index_of(id));
  return out;
}

/// Per-window coupling graphs plus a single-run "ensemble" placeholder for
/// windows whose graph came out empty.
struct WindowStage {
  std::vector<WindowSlice> slices;
  std::vector<BcBuildResult> builds;
  std::vector<Ensemble> ensembles;
};

inline WindowStage stage_windows(const Corpus& corpus, const AlgorithmConfig& cfg,
                                 bool with_ensembles) {
  WindowStage st;
  st.slices = slice_windows(corpus, cfg.delta_t);
  st.builds.reserve(st.slices.size());
  for (const WindowSlice& s : st.slices)
    st.builds.push_back(build_bc_graph(corpus, s.pubs, cfg.min_shared_refs));

  bool any_edges = false;
  for (const BcBuildResult& b : st.builds) any_edges = any_edges || !b.graph.empty();
  if (!any_edges) throw ValidationError("no window has any qualifying coupling link");

  if (with_ensembles) {
    st.ensembles.resize(st.builds.size());
    for (std::size_t w = 0; w < st.builds.size(); ++w) {
      std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(w) * cfg.n_runs;
      if (st.builds[w].graph.empty())
        st.ensembles[w] = Ensemble{{Partition{}}, seed};
      else
        st.ensembles[w] = louvain_ensemble(st.builds[w].graph, cfg.n_runs, seed, cfg.workers);
    }
  }
  return st;
}

inline WindowReport window_report_local(const WindowStage& st, std::size_t w, const Partition& chosen) {
  WindowReport r;
  r.window = static_cast<int>(w);
  r.span = st.slices[w].window;
  r.population = st.slices[w].pubs.size();
  r.graph_nodes = st.builds[w].graph.node_count();
  r.excluded = r.population - *r.graph_nodes;
  if (!chosen.empty()) {
    r.q = chosen.modularity();
    r.seed = chosen.seed();
  }
  return r;
}

inline void fill_boundary_counts(BoundaryReport& br, const MatchResult& match) {
  br.pairs = match.pairs.size();
  br.splits = match.splits.size();
  br.merges = match.merges.size();
  for (const MatchResult::Link& p : match.pairs)
    if (p.dq <= 0.0) ++br.nonpositive_dq_pairs;
}

/// Link-free match result shaped to the two partitions (used when the
/// two-period graph has no edges at all).
inline MatchResult empty_match(const Partition& a, const Partition& b) {
  MatchResult m;
  m.successor.assign(a.community_count(), std::nullopt);
  m.predecessor.assign(b.community_count(), std::nullopt);
  return m;
}

/// Matches every adjacent window pair of already-chosen partitions and builds
/// the stream set. Shared tail of the GPA / BMLA pipelines.
inline DetectionResult chain_chosen_partitions(const Corpus& corpus, const AlgorithmConfig& cfg,
                                               const WindowStage& st,
                                               const std::vector<Partition>& chosen,
                                               RunReport report,
                                               std::vector<MatchResult>* out_matches = nullptr) {
  std::vector<MatchResult> matches;
  for (std::size_t k = 0; k + 1 < chosen.size(); ++k) {
    BoundaryReport br;
    br.boundary = static_cast<int>(k) + 1;
    BcBuildResult cross = build_cross_period_graph(
        corpus, corpus_indices(corpus, st.builds[k].graph),
        corpus_indices(corpus, st.builds[k + 1].graph), cfg.min_shared_refs);
    MatchResult match = empty_match(chosen[k], chosen[k + 1]);
    if (!cross.graph.empty()) {
      InterClusterLinks links = inter_cluster_links(chosen[k], chosen[k + 1], cross.graph);
      match = match_from_links(links, cfg.theta);
      br.combined_q = combined_modularity(links, match);
      br.evaluations = 1;
      report.matching_evaluations += 1;
    }
    fill_boundary_counts(br, match);
    report.boundaries.push_back(br);
    matches.push_back(std::move(match));
  }

  StreamSet streams = build_streams(matches, chosen, windows_of(st.slices));
  streams = label_streams(std::move(streams), corpus);
  if (out_matches) *out_matches = std::move(matches);
  return {std::move(streams), std::move(report)};
}

}  // namespace detail

/// Global Algorithm: one Louvain ensemble on the whole-corpus coupling graph;
/// each community of the best-modularity partition becomes one stream spanning
/// the windows of its publications. Yields no dynamical events.
inline DetectionResult run_ga(const Corpus& corpus, const AlgorithmConfig& cfg) {
  detail::WallTimer timer;
  cfg.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");

  std::vector<WindowSlice> slices = slice_windows(corpus, cfg.delta_t);
  BcBuildResult global = build_bc_graph(corpus, cfg.min_shared_refs);
  if (global.graph.empty())
    throw ValidationError("global coupling graph has zero qualifying links");

  Ensemble ens = louvain_ensemble(global.graph, cfg.n_runs, cfg.base_seed, cfg.workers);
  const Partition& best = best_modularity(ens);

  StreamSet ss;
  ss.windows = detail::windows_of(slices);
  int first_year = ss.windows.front().start;
  std::uint32_t k = best.community_count();
  std::vector<std::set<int>> active(k);
  for (std::uint32_t i = 0; i < best.node_count(); ++i) {
    const std::string& id = best.node_ids()[i];
    std::uint32_t c = best.community_of_index(i);
    int year = corpus.at(*corpus.index_of(id)).year;
    active[c].insert((year - first_year) / cfg.delta_t);
    ss.membership.emplace(id, static_cast<int>(c));
  }
  ss.streams.resize(k);
  for (std::uint32_t c = 0; c < k; ++c)
    for (int w : active[c]) ss.streams[c].push_back({w, c});
  ss = label_streams(std::move(ss), corpus);

  RunReport report;
  report.algorithm = to_string(Algorithm::ga);
  report.global_q = best.modularity();
  report.global_seed = best.seed();
  report.global_nodes = global.graph.node_count();
  report.global_excluded = global.excluded.size();
  for (std::size_t w = 0; w < slices.size(); ++w) {
    WindowReport r;
    r.window = static_cast<int>(w);
    r.span = slices[w].window;
    r.population = slices[w].pubs.size();
    report.windows.push_back(r);
  }
  report.wall_seconds = timer.seconds();
  return {std::move(ss), std::move(report)};
}

/// Global Projected Algorithm: GA streams projected into each window (grouping
/// the window's kept articles by their GA stream), then chained with the
/// matching algorithm. Articles connected only across periods are dropped from
/// their window and accounted as loss.
inline DetectionResult run_gpa(const Corpus& corpus, const AlgorithmConfig& cfg) {
  detail::WallTimer timer;
  cfg.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");

  BcBuildResult global = build_bc_graph(corpus, cfg.min_shared_refs);
  if (global.graph.empty())
    throw ValidationError("global coupling graph has zero qualifying links");
  Ensemble ens = louvain_ensemble(global.graph, cfg.n_runs, cfg.base_seed, cfg.workers);
  const Partition& ga_best = best_modularity(ens);

  detail::WindowStage st = detail::stage_windows(corpus, cfg, /*with_ensembles=*/false);

  RunReport report;
  report.algorithm = to_string(Algorithm::gpa);
  report.global_q = ga_best.modularity();
  report.global_seed = ga_best.seed();
  report.global_nodes = global.graph.node_count();
  report.global_excluded = global.excluded.size();

  std::vector<Partition> projected(st.slices.size());
  std::vector<std::vector<std::uint32_t>> origin(st.slices.size());  // cluster -> GA community
  for (std::size_t w = 0; w < st.slices.size(); ++w) {
    const BCGraph& wg = st.builds[w].graph;
    if (!wg.empty()) {
      std::unordered_map<std::string, std::uint32_t> assign;
      assign.reserve(wg.node_count());
      for (const std::string& id : wg.node_ids()) {
        auto c = ga_best.community_of(id);
        if (!c)
          throw ValidationError("window article missing from the global graph: " + id);
        assign.emplace(id, *c);
      }
      projected[w] = Partition::from_assignment(wg, assign);
      origin[w].resize(projected[w].community_count());
      for (std::uint32_t i = 0; i < projected[w].node_count(); ++i)
        origin[w][projected[w].community_of_index(i)] = assign[projected[w].node_ids()[i]];
    }

    WindowReport r = detail::window_report_local(st, w, projected[w]);
    std::size_t in_global = 0;
    for (std::uint32_t pi : st.slices[w].pubs)
      if (ga_best.community_of(corpus.at(pi).id)) ++in_global;
    r.in_global = in_global;
    r.excluded = in_global - *r.graph_nodes;  // GPA loss is measured against the global graph
    r.loss_fraction = in_global == 0 ? 0.0 : static_cast<double>(*r.excluded) / static_cast<double>(in_global);
    report.windows.push_back(r);
  }

  std::vector<MatchResult> matches;
  DetectionResult out =
      detail::chain_chosen_partitions(corpus, cfg, st, projected, std::move(report), &matches);

  // Flag pairs whose projected clusters descend from different GA streams.
  for (std::size_t k = 0; k < matches.size(); ++k) {
    std::size_t cross_origin = 0;
    for (const MatchResult::Link& p : matches[k].pairs)
      if (origin[k][p.a] != origin[k + 1][p.b]) ++cross_origin;
    out.report.boundaries[k].cross_origin_pairs = cross_origin;
  }
  out.report.wall_seconds = timer.seconds();
  return out;
}

/// Best-Modularity Local Algorithm: per window keep the best-Q partition of an
/// N-run ensemble, then chain adjacent windows with the matching algorithm.
inline DetectionResult run_bmla(const Corpus& corpus, const AlgorithmConfig& cfg) {
  detail::WallTimer timer;
  cfg.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");

  detail::WindowStage st = detail::stage_windows(corpus, cfg, /*with_ensembles=*/true);

  RunReport report;
  report.algorithm = to_string(Algorithm::bmla);

  std::vector<Partition> chosen(st.slices.size());
  for (std::size_t w = 0; w < st.slices.size(); ++w) {
    chosen[w] = best_modularity(st.ensembles[w]);
    report.windows.push_back(detail::window_report_local(st, w, chosen[w]));
  }
  if (st.slices.size() == 1)
    report.warnings.push_back("single window: streams equal the window communities");

  DetectionResult out = detail::chain_chosen_partitions(corpus, cfg, st, chosen, std::move(report));
  out.report.wall_seconds = timer.seconds();
  return out;
}

/// Best-Combination Local Communities: scan all N x N ensemble combinations of
/// the first two windows, then N candidates per later window, keeping at each
/// step the combination maximizing the modularity of the two-period coupling
/// graph with paired clusters merged. N^2 + N (T-2) matching evaluations in
/// place of the infeasible N^T global scan.
inline DetectionResult run_bclc(const Corpus& corpus, const AlgorithmConfig& cfg) {
  detail::WallTimer timer;
  cfg.validate();
  if (corpus.empty()) throw ValidationError("empty corpus");

  detail::WindowStage st = detail::stage_windows(corpus, cfg, /*with_ensembles=*/true);
  std::size_t n_windows = st.slices.size();

  RunReport report;
  report.algorithm = to_string(Algorithm::bclc);

  std::vector<Partition> chosen(n_windows);
  std::vector<MatchResult> matches;

  if (n_windows == 1) {
    chosen[0] = best_modularity(st.ensembles[0]);
    report.warnings.push_back("single window: streams equal the window communities");
  }

  for (std::size_t k = 0; k + 1 < n_windows; ++k) {
    BoundaryReport br;
    br.boundary = static_cast<int>(k) + 1;

    BcBuildResult cross = build_cross_period_graph(
        corpus, detail::corpus_indices(corpus, st.builds[k].graph),
        detail::corpus_indices(corpus, st.builds[k + 1].graph), cfg.min_shared_refs);

    const std::vector<Partition>& cand_b = st.ensembles[k + 1].partitions;
    MatchResult best_match;

    if (cross.graph.empty()) {
      // Nothing to couple; fall back to the individually best partitions.
      if (k == 0) chosen[0] = best_modularity(st.ensembles[0]);
      chosen[k + 1] = best_modularity(st.ensembles[k + 1]);
      best_match = detail::empty_match(chosen[k], chosen[k + 1]);
    } else if (k == 0) {
      const std::vector<Partition>& cand_a = st.ensembles[0].partitions;
      std::size_t na = cand_a.size(), nb = cand_b.size();
      std::vector<double> scores(na * nb);
      detail::parallel_for(na * nb, cfg.workers, [&](std::size_t idx) {
        InterClusterLinks links =
            inter_cluster_links(cand_a[idx / nb], cand_b[idx % nb], cross.graph);
        scores[idx] = combined_modularity(links, match_from_links(links, cfg.theta));
      });
      std::size_t best = 0;
      for (std::size_t idx = 1; idx < scores.size(); ++idx)
        if (scores[idx] > scores[best]) best = idx;  // ties keep the lowest (run A, run B)
      chosen[0] = cand_a[best / nb];
      chosen[1] = cand_b[best % nb];
      InterClusterLinks links = inter_cluster_links(chosen[0], chosen[1], cross.graph);
      best_match = match_from_links(links, cfg.theta);
      br.combined_q = combined_modularity(links, best_match);
      br.evaluations = na * nb;
    } else {
      std::size_t nb = cand_b.size();
      std::vector<double> scores(nb);
      detail::parallel_for(nb, cfg.workers, [&](std::size_t j) {
        InterClusterLinks links = inter_cluster_links(chosen[k], cand_b[j], cross.graph);
        scores[j] = combined_modularity(links, match_from_links(links, cfg.theta));
      });
      std::size_t best = 0;
      for (std::size_t j = 1; j < scores.size(); ++j)
        if (scores[j] > scores[best]) best = j;  // ties keep the lowest run index
      chosen[k + 1] = cand_b[best];
      InterClusterLinks links = inter_cluster_links(chosen[k], chosen[k + 1], cross.graph);
      best_match = match_from_links(links, cfg.theta);
      br.combined_q = combined_modularity(links, best_match);
      br.evaluations = nb;
    }

    report.matching_evaluations += br.evaluations;
    detail::fill_boundary_counts(br, best_match);
    report.boundaries.push_back(br);
    matches.push_back(std::move(best_match));
  }

  for (std::size_t w = 0; w < n_windows; ++w)
    report.windows.push_back(detail::window_report_local(st, w, chosen[w]));

  StreamSet streams = build_streams(matches, chosen, detail::windows_of(st.slices));
  streams = label_streams(std::move(streams), corpus);
  report.wall_seconds = timer.seconds();
  return {std::move(streams), std::move(report)};
}

inline DetectionResult detect(const Corpus& corpus, const AlgorithmConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::ga: return run_ga(corpus, cfg);
    case Algorithm::gpa: return run_gpa(corpus, cfg);
    case Algorithm::bmla: return run_bmla(corpus, cfg);
    case Algorithm::bclc: return run_bclc(corpus, cfg);
  }
  throw ValidationError("unknown algorithm");
}

}  // namespace bcstreams
