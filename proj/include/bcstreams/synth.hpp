#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bcstreams/compare.hpp"
#include "bcstreams/corpus.hpp"
#include "bcstreams/detail/rng.hpp"
#include "bcstreams/errors.hpp"
#include "bcstreams/matching.hpp"

namespace bcstreams {

enum class PlantedEventType { split, merge, birth, death };

inline const char* to_string(PlantedEventType t) {
  switch (t) {
    case PlantedEventType::split: return "split";
    case PlantedEventType::merge: return "merge";
    case PlantedEventType::birth: return "birth";
    case PlantedEventType::death: return "death";
  }
  return "?";
}

inline std::optional<PlantedEventType> parse_planted_event_type(const std::string& s) {
  if (s == "split") return PlantedEventType::split;
  if (s == "merge") return PlantedEventType::merge;
  if (s == "birth") return PlantedEventType::birth;
  if (s == "death") return PlantedEventType::death;
  return std::nullopt;
}

/// A planted stream: alive in windows [first_window, last_window], emitting a
/// fixed (or per-window scheduled) number of publications per window, each
/// drawing its references from the stream's reference pool.
struct PlantedStream {
  std::string id;
  int first_window = 0;
  int last_window = 0;
  int pubs_per_window = 0;
  std::vector<int> pubs_schedule;  // optional; indexed by absolute window, overrides the scalar
  int pool_size = 0;
  std::string label;

  int pubs_in(int w) const {
    if (!pubs_schedule.empty())
      return w < static_cast<int>(pubs_schedule.size()) ? pubs_schedule[static_cast<std::size_t>(w)] : 0;
    return pubs_per_window;
  }
};

/// split at boundary b: from = [parent], to = [child]; the child is born at
/// window b with a slice of the parent's pool (sized by the child's pool_size),
/// the parent continues with the remainder. merge at boundary b: from =
/// [dying], to = [absorber]; the dying stream ends at window b-1 and its pool
/// is absorbed. birth / death entries are descriptive only.
struct PlantedEvent {
  int boundary = 0;
  PlantedEventType type = PlantedEventType::split;
  std::vector<std::string> from, to;
};

struct PlantedScenario {
  int windows = 0;
  int delta_t = 5;
  int start_year = 2000;
  int refs_per_pub = 8;
  double noise = 0.0;       // probability a reference is drawn from a foreign pool
  double pool_drift = 0.0;  // fraction of each pool replaced per window
  std::uint64_t seed = 0;
  std::vector<PlantedStream> streams;
  std::vector<PlantedEvent> events;
};

struct GroundTruth {
  std::map<std::string, std::string> membership;  // publication id -> planted stream id
  std::vector<PlantedEvent> events;               // realized events, split/merge plus birth/death
};

namespace detail {

inline const PlantedStream& find_stream(const PlantedScenario& sc, const std::string& id,
                                        const char* role) {
  for (const PlantedStream& s : sc.streams)
    if (s.id == id) return s;
  throw ValidationError(std::string("event ") + role + " references unknown stream: " + id);
}

inline void validate_scenario(const PlantedScenario& sc) {
  if (sc.windows < 1) throw ValidationError("scenario needs at least one window");
  if (sc.delta_t < 1) throw ValidationError("delta_t must be at least 1");
  if (sc.refs_per_pub < 1) throw ValidationError("refs_per_pub must be at least 1");
  if (sc.noise < 0.0 || sc.noise >= 0.5) throw ValidationError("noise must lie in [0, 0.5)");
  if (sc.pool_drift < 0.0 || sc.pool_drift > 1.0) throw ValidationError("pool_drift must lie in [0, 1]");
  if (sc.streams.empty()) throw ValidationError("scenario has no streams");

  std::set<std::string> ids;
  for (const PlantedStream& s : sc.streams) {
    if (s.id.empty()) throw ValidationError("stream with empty id");
    if (!ids.insert(s.id).second) throw ValidationError("duplicate stream id: " + s.id);
    if (s.first_window < 0 || s.last_window < s.first_window || s.last_window >= sc.windows)
      throw ValidationError("stream " + s.id + " has an invalid lifespan");
    if (s.pool_size < 1) throw ValidationError("stream " + s.id + " has an empty pool");
    if (s.pool_size < sc.refs_per_pub)
      throw ValidationError("stream " + s.id + " pool smaller than refs_per_pub");
    for (int w = s.first_window; w <= s.last_window; ++w)
      if (s.pubs_in(w) < 0) throw ValidationError("stream " + s.id + " has a negative schedule");
  }

  for (const PlantedEvent& e : sc.events) {
    switch (e.type) {
      case PlantedEventType::split: {
        if (e.from.size() != 1 || e.to.size() != 1)
          throw ValidationError("split events take one parent and one child");
        const PlantedStream& parent = find_stream(sc, e.from[0], "split parent");
        const PlantedStream& child = find_stream(sc, e.to[0], "split child");
        if (e.boundary < 1 || e.boundary >= sc.windows)
          throw ValidationError("split boundary out of range");
        if (parent.first_window > e.boundary - 1 || parent.last_window < e.boundary)
          throw ValidationError("split parent " + parent.id + " not alive across the boundary");
        if (child.first_window != e.boundary)
          throw ValidationError("split child " + child.id + " must be born at the boundary");
        if (child.pool_size >= parent.pool_size)
          throw ValidationError("split child " + child.id + " pool must be smaller than the parent's");
        if (parent.pool_size - child.pool_size < sc.refs_per_pub)
          throw ValidationError("split leaves parent " + parent.id + " with too small a pool");
        break;
      }
      case PlantedEventType::merge: {
        if (e.from.size() != 1 || e.to.size() != 1)
          throw ValidationError("merge events take one dying stream and one absorber");
        const PlantedStream& dying = find_stream(sc, e.from[0], "merge source");
        const PlantedStream& absorber = find_stream(sc, e.to[0], "merge target");
        if (e.boundary < 1 || e.boundary >= sc.windows)
          throw ValidationError("merge boundary out of range");
        if (dying.last_window != e.boundary - 1)
          throw ValidationError("merge source " + dying.id + " must end right before the boundary");
        if (absorber.first_window > e.boundary - 1 || absorber.last_window < e.boundary)
          throw ValidationError("merge target " + absorber.id + " not alive across the boundary");
        break;
      }
      case PlantedEventType::birth: {
        if (e.to.size() != 1) throw ValidationError("birth events take one stream");
        const PlantedStream& s = find_stream(sc, e.to[0], "birth");
        if (s.first_window != e.boundary)
          throw ValidationError("birth boundary does not match stream " + s.id);
        break;
      }
      case PlantedEventType::death: {
        if (e.from.size() != 1) throw ValidationError("death events take one stream");
        const PlantedStream& s = find_stream(sc, e.from[0], "death");
        if (s.last_window != e.boundary - 1)
          throw ValidationError("death boundary does not match stream " + s.id);
        break;
      }
    }
  }
}

}  // namespace detail

/// Generates a corpus with planted streams and events. Publications of a
/// stream draw `refs_per_pub` distinct references from the stream's current
/// pool (from a random other alive stream's pool with probability `noise`).
/// Pools drift by replacing a `pool_drift` fraction per window; splits carve a
/// pool slice for the child, merges absorb the dying stream's pool. The result
/// is a pure function of the scenario.
inline std::pair<Corpus, GroundTruth> generate(const PlantedScenario& sc) {
  detail::validate_scenario(sc);
  detail::Rng rng(sc.seed);

  std::uint64_t next_ref = 0;
  auto fresh_ref = [&next_ref]() { return "ref" + std::to_string(next_ref++); };

  std::map<std::string, std::vector<std::string>> pools;
  std::vector<Publication> pubs;
  GroundTruth truth;

  auto alive = [](const PlantedStream& s, int w) {
    return w >= s.first_window && w <= s.last_window;
  };

  for (int w = 0; w < sc.windows; ++w) {
    // Pools evolve at the boundary: drift, then split/merge events, then births.
    if (w > 0) {
      for (auto& [id, pool] : pools) {
        (void)id;
        std::size_t m = static_cast<std::size_t>(sc.pool_drift * static_cast<double>(pool.size()));
        std::vector<std::uint32_t> pos(pool.size());
        for (std::uint32_t i = 0; i < pos.size(); ++i) pos[i] = i;
        for (std::size_t i = 0; i < m; ++i) {
          std::size_t j = i + detail::uniform_index(rng, pos.size() - i);
          std::swap(pos[i], pos[j]);
          pool[pos[i]] = fresh_ref();
        }
      }
      for (const PlantedEvent& e : sc.events) {
        if (e.boundary != w) continue;
        if (e.type == PlantedEventType::split) {
          const PlantedStream& child = detail::find_stream(sc, e.to[0], "split child");
          std::vector<std::string>& parent_pool = pools.at(e.from[0]);
          std::size_t slice = static_cast<std::size_t>(child.pool_size);
          if (parent_pool.size() <= slice)
            throw ValidationError("split slice exhausts the pool of " + e.from[0]);
          std::vector<std::string> child_pool(parent_pool.end() - static_cast<long>(slice),
                                              parent_pool.end());
          parent_pool.resize(parent_pool.size() - slice);
          pools.emplace(child.id, std::move(child_pool));
        } else if (e.type == PlantedEventType::merge) {
          std::vector<std::string>& src = pools.at(e.from[0]);
          std::vector<std::string>& dst = pools.at(e.to[0]);
          dst.insert(dst.end(), src.begin(), src.end());
          pools.erase(e.from[0]);
        }
      }
    }
    for (const PlantedStream& s : sc.streams)
      if (s.first_window == w && !pools.count(s.id)) {
        std::vector<std::string> pool(static_cast<std::size_t>(s.pool_size));
        for (auto& r : pool) r = fresh_ref();
        pools.emplace(s.id, std::move(pool));
      }

    // Emit this window's publications, streams in declaration order.
    std::vector<const PlantedStream*> alive_now;
    for (const PlantedStream& s : sc.streams)
      if (alive(s, w)) alive_now.push_back(&s);

    for (std::size_t si = 0; si < alive_now.size(); ++si) {
      const PlantedStream* s = alive_now[si];
      const std::vector<std::string>& own = pools.at(s->id);
      if (own.size() < static_cast<std::size_t>(sc.refs_per_pub))
        throw ValidationError("pool of " + s->id + " too small for refs_per_pub in window " +
                              std::to_string(w));
      int count = s->pubs_in(w);
      for (int k = 0; k < count; ++k) {
        Publication p;
        p.id = s->id + "-w" + std::to_string(w) + "-" + std::to_string(k);
        p.year = sc.start_year + w * sc.delta_t + (k % sc.delta_t);
        p.label = s->label;

        std::set<std::string> refs;
        std::size_t want = static_cast<std::size_t>(sc.refs_per_pub);
        std::size_t attempts = 0;
        while (refs.size() < want) {
          if (++attempts > 64 * want) {
            // Collision-heavy corner; fill deterministically from the own pool.
            for (const std::string& r : own) {
              if (refs.size() >= want) break;
              refs.insert(r);
            }
            break;
          }
          const std::vector<std::string>* pool = &own;
          if (alive_now.size() > 1 && detail::uniform01(rng) < sc.noise) {
            std::size_t other = detail::uniform_index(rng, alive_now.size() - 1);
            if (other >= si) ++other;
            pool = &pools.at(alive_now[other]->id);
          }
          refs.insert((*pool)[detail::uniform_index(rng, pool->size())]);
        }
        p.refs.assign(refs.begin(), refs.end());
        pubs.push_back(std::move(p));
        truth.membership.emplace(pubs.back().id, s->id);
      }
    }
  }

  // Realized events: scenario splits/merges plus derived births and deaths.
  std::set<std::string> split_children, merge_sources;
  for (const PlantedEvent& e : sc.events) {
    if (e.type == PlantedEventType::split) {
      truth.events.push_back(e);
      split_children.insert(e.to[0]);
    } else if (e.type == PlantedEventType::merge) {
      truth.events.push_back(e);
      merge_sources.insert(e.from[0]);
    }
  }
  for (const PlantedStream& s : sc.streams) {
    if (s.first_window > 0 && !split_children.count(s.id))
      truth.events.push_back({s.first_window, PlantedEventType::birth, {}, {s.id}});
    if (s.last_window < sc.windows - 1 && !merge_sources.count(s.id))
      truth.events.push_back({s.last_window + 1, PlantedEventType::death, {s.id}, {}});
  }
  std::sort(truth.events.begin(), truth.events.end(), [](const PlantedEvent& a, const PlantedEvent& b) {
    auto ka = std::tie(a.boundary, a.type, a.from, a.to);
    auto kb = std::tie(b.boundary, b.type, b.from, b.to);
    return ka < kb;
  });

  return {Corpus(std::move(pubs)), std::move(truth)};
}

/// Recovery quality of a detected stream set against the planted truth:
/// symmetric NMI of the memberships on the shared universe, plus the fraction
/// of planted split/merge boundaries with a detected event of the same type
/// within one window.
struct RecoveryReport {
  double nmi = 0.0;
  double event_recall = 0.0;
  std::size_t shared_universe = 0;
  std::size_t planted_events = 0;
  std::size_t matched_events = 0;
};

inline RecoveryReport score_recovery(const StreamSet& detected, const GroundTruth& truth) {
  StreamPartition det = to_stream_partition(detected);
  StreamPartition ref;
  ref.assignment = truth.membership;

  RestrictionReport restriction;
  auto [dx, ry] = restrict_to_shared(det, ref, &restriction);

  RecoveryReport out;
  out.shared_universe = restriction.shared;
  double hx = entropy(dx);
  double hy = entropy(ry);
  if (hx == 0.0 || hy == 0.0) {
    // Degenerate single-stream side: identical partitions score 1, else 0.
    out.nmi = (hx == 0.0 && hy == 0.0) ? 1.0 : 0.0;
  } else {
    out.nmi = nmi(dx, ry);
  }

  for (const PlantedEvent& e : truth.events) {
    if (e.type != PlantedEventType::split && e.type != PlantedEventType::merge) continue;
    ++out.planted_events;
    EventType want = e.type == PlantedEventType::split ? EventType::split : EventType::merge;
    bool hit = false;
    for (const StreamEvent& d : detected.events)
      if (d.type == want && std::abs(d.boundary - e.boundary) <= 1) {
        hit = true;
        break;
      }
    if (hit) ++out.matched_events;
  }
  out.event_recall = out.planted_events == 0
                         ? 1.0
                         : static_cast<double>(out.matched_events) / static_cast<double>(out.planted_events);
  return out;
}

}  // namespace bcstreams
