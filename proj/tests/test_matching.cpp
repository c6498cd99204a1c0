#include <catch2/catch_amalgamated.hpp>

#include "bcstreams/corpus.hpp"
#include "bcstreams/matching.hpp"
#include "oracles.hpp"

using namespace bcstreams;

namespace {

Partition singleton_partition(std::vector<std::string> nodes) {
  std::unordered_map<std::string, std::uint32_t> same;
  for (const std::string& n : nodes) same.emplace(n, 0);
  return Partition::over_nodes(std::move(nodes), same);
}

/// Two-period fixture around two reference pools: clusters a0/b0 couple through
/// pool P, a1/b1 through pool Q, with no cross-pool links.
struct PairFixture {
  Corpus corpus{std::vector<Publication>{
      {"x1", 2000, {"p1", "p2", "p3"}, ""},
      {"x2", 2001, {"p2", "p3", "p4"}, ""},
      {"x3", 2000, {"q1", "q2", "q3"}, ""},
      {"x4", 2001, {"q2", "q3", "q4"}, ""},
      {"y1", 2005, {"p1", "p2", "p4"}, ""},
      {"y2", 2006, {"p1", "p3", "p4"}, ""},
      {"y3", 2005, {"q1", "q2", "q4"}, ""},
      {"y4", 2006, {"q1", "q3", "q4"}, ""},
  }};
  BCGraph cross;
  Partition pa, pb;

  PairFixture() {
    std::vector<std::uint32_t> a{*corpus.index_of("x1"), *corpus.index_of("x2"),
                                 *corpus.index_of("x3"), *corpus.index_of("x4")};
    std::vector<std::uint32_t> b{*corpus.index_of("y1"), *corpus.index_of("y2"),
                                 *corpus.index_of("y3"), *corpus.index_of("y4")};
    cross = build_cross_period_graph(corpus, a, b, 2).graph;
    pa = Partition::over_nodes({"x1", "x2", "x3", "x4"},
                               {{"x1", 0}, {"x2", 0}, {"x3", 1}, {"x4", 1}});
    pb = Partition::over_nodes({"y1", "y2", "y3", "y4"},
                               {{"y1", 0}, {"y2", 0}, {"y3", 1}, {"y4", 1}});
  }
};

/// One A-cluster linked to two B-clusters, with b0 clearly dominant; matching
/// must pair (a0, b0) and record (a0, b1) as a split.
struct SplitFixture {
  Corpus corpus{std::vector<Publication>{
      {"x1", 2000, {"p1", "p2", "p3", "p4"}, ""},
      {"x2", 2001, {"p1", "p2", "p3", "p5"}, ""},
      {"y1", 2005, {"p1", "p2", "p3", "p6"}, ""},
      {"y2", 2006, {"p1", "p2", "p4", "p5"}, ""},
      {"y3", 2005, {"p1", "p4", "p5", "z1"}, ""},
      {"y4", 2006, {"p2", "p4", "p5", "z1"}, ""},
  }};
  BCGraph cross;
  Partition pa, pb;

  SplitFixture() {
    std::vector<std::uint32_t> a{*corpus.index_of("x1"), *corpus.index_of("x2")};
    std::vector<std::uint32_t> b{*corpus.index_of("y1"), *corpus.index_of("y2"),
                                 *corpus.index_of("y3"), *corpus.index_of("y4")};
    cross = build_cross_period_graph(corpus, a, b, 2).graph;
    pa = singleton_partition({"x1", "x2"});
    pb = Partition::over_nodes({"y1", "y2", "y3", "y4"},
                               {{"y1", 0}, {"y2", 0}, {"y3", 1}, {"y4", 1}});
  }
};

/// Random two-period instance: period graphs with a path backbone plus random
/// cross-period edges, random per-period partitions.
struct RandomTwoPeriod {
  BCGraph ga, gb, cross;
  Partition pa, pb;
};

RandomTwoPeriod random_two_period(detail::Rng& rng, std::size_t max_side = 6) {
  std::size_t na = 2 + detail::uniform_index(rng, max_side - 1);
  std::size_t nb = 2 + detail::uniform_index(rng, max_side - 1);
  auto name = [](const char* p, std::size_t i) { return std::string(p) + std::to_string(i); };
  auto weight = [&rng]() { return 0.05 + 0.9 * detail::uniform01(rng); };

  std::vector<std::tuple<std::string, std::string, double>> ea, eb, all;
  for (std::size_t i = 0; i + 1 < na; ++i) ea.emplace_back(name("a", i), name("a", i + 1), weight());
  for (std::size_t i = 0; i + 2 < na; ++i)
    for (std::size_t j = i + 2; j < na; ++j)
      if (detail::uniform01(rng) < 0.4) ea.emplace_back(name("a", i), name("a", j), weight());
  for (std::size_t i = 0; i + 1 < nb; ++i) eb.emplace_back(name("b", i), name("b", i + 1), weight());
  for (std::size_t i = 0; i + 2 < nb; ++i)
    for (std::size_t j = i + 2; j < nb; ++j)
      if (detail::uniform01(rng) < 0.4) eb.emplace_back(name("b", i), name("b", j), weight());
  all = ea;
  all.insert(all.end(), eb.begin(), eb.end());
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      if (detail::uniform01(rng) < 0.5) all.emplace_back(name("a", i), name("b", j), weight());

  RandomTwoPeriod out;
  out.ga = BCGraph::from_edges(ea);
  out.gb = BCGraph::from_edges(eb);
  out.cross = BCGraph::from_edges(all);
  std::unordered_map<std::string, std::uint32_t> aa, ab;
  std::uint32_t ka = 1 + static_cast<std::uint32_t>(detail::uniform_index(rng, na));
  std::uint32_t kb = 1 + static_cast<std::uint32_t>(detail::uniform_index(rng, nb));
  for (std::size_t i = 0; i < na; ++i)
    aa.emplace(name("a", i), static_cast<std::uint32_t>(detail::uniform_index(rng, ka)));
  for (std::size_t j = 0; j < nb; ++j)
    ab.emplace(name("b", j), static_cast<std::uint32_t>(detail::uniform_index(rng, kb)));
  out.pa = Partition::from_assignment(out.ga, aa);
  out.pb = Partition::from_assignment(out.gb, ab);
  return out;
}

/// Community map of the union partition, with the candidate pair (a, b) merged
/// when requested.
std::unordered_map<std::string, std::uint32_t> union_assignment(
    const RandomTwoPeriod& tp, std::optional<std::pair<std::uint32_t, std::uint32_t>> merged) {
  std::unordered_map<std::string, std::uint32_t> m;
  std::uint32_t offset = tp.pa.community_count();
  for (std::uint32_t i = 0; i < tp.pa.node_count(); ++i)
    m.emplace(tp.pa.node_ids()[i], tp.pa.community_of_index(i));
  for (std::uint32_t i = 0; i < tp.pb.node_count(); ++i) {
    std::uint32_t c = tp.pb.community_of_index(i);
    std::uint32_t id = merged && c == merged->second ? merged->first : offset + c;
    m.emplace(tp.pb.node_ids()[i], id);
  }
  return m;
}

}  // namespace

TEST_CASE("inter-cluster links") {
  SECTION("no cross edges means zero cross weight") {
    BCGraph cross = BCGraph::from_edges({{"a1", "a2", 0.5}, {"b1", "b2", 0.5}});
    InterClusterLinks links = inter_cluster_links(singleton_partition({"a1", "a2"}),
                                                  singleton_partition({"b1", "b2"}), cross);
    REQUIRE(links.cross.empty());
    REQUIRE(links.omega_raw(0, 0) == 0.0);
  }

  SECTION("one singleton pair with a single cross edge") {
    BCGraph cross = BCGraph::from_edges({{"i", "j", 0.5}});
    InterClusterLinks links =
        inter_cluster_links(singleton_partition({"i"}), singleton_partition({"j"}), cross);
    REQUIRE(links.omega_raw(0, 0) == 0.5);
    REQUIRE(links.omega_norm(0, 0) == 0.5);
    REQUIRE(links.total == 0.5);
  }

  SECTION("normalization divides by both cluster sizes") {
    // 2 x 3 clusters, cross weights summing to 1.2
    BCGraph cross = BCGraph::from_edges({{"a1", "a2", 0.3},
                                         {"b1", "b2", 0.3},
                                         {"b2", "b3", 0.3},
                                         {"a1", "b1", 0.5},
                                         {"a2", "b2", 0.4},
                                         {"a2", "b3", 0.3}});
    InterClusterLinks links =
        inter_cluster_links(singleton_partition({"a1", "a2"}),
                            singleton_partition({"b1", "b2", "b3"}), cross);
    REQUIRE_THAT(links.omega_raw(0, 0), Catch::Matchers::WithinAbs(1.2, 1e-15));
    REQUIRE_THAT(links.omega_norm(0, 0), Catch::Matchers::WithinAbs(0.2, 1e-15));
  }

  SECTION("cluster strengths sum to twice the total weight") {
    detail::Rng rng(41);
    for (int t = 0; t < 20; ++t) {
      RandomTwoPeriod tp = random_two_period(rng);
      InterClusterLinks links = inter_cluster_links(tp.pa, tp.pb, tp.cross);
      double sum = 0.0;
      for (double s : links.strength_a) sum += s;
      for (double s : links.strength_b) sum += s;
      REQUIRE_THAT(sum, Catch::Matchers::WithinRel(2.0 * links.total, 1e-12));
    }
  }

  SECTION("a node outside both partitions is an error") {
    BCGraph cross = BCGraph::from_edges({{"i", "j", 0.5}, {"j", "k", 0.5}});
    REQUIRE_THROWS_AS(
        inter_cluster_links(singleton_partition({"i"}), singleton_partition({"j"}), cross),
        ValidationError);
  }
}

TEST_CASE("delta Q") {
  SECTION("formula spot checks") {
    InterClusterLinks links;
    links.size_a = {1};
    links.size_b = {1};
    links.strength_a = {1.0};
    links.strength_b = {1.0};
    links.internal_a = {0.0};
    links.internal_b = {0.0};
    links.total = 10.0;
    REQUIRE_THAT(delta_q(links, 0, 0), Catch::Matchers::WithinAbs(-0.05, 1e-15));

    links.cross[{0, 0}] = 2.0;
    links.strength_a = {3.0};
    links.strength_b = {4.0};
    REQUIRE_THAT(delta_q(links, 0, 0), Catch::Matchers::WithinAbs(1.4, 1e-15));
  }

  SECTION("equals the two-period modularity change of merging, times Omega") {
    detail::Rng rng(43);
    for (int t = 0; t < 30; ++t) {
      RandomTwoPeriod tp = random_two_period(rng);
      InterClusterLinks links = inter_cluster_links(tp.pa, tp.pb, tp.cross);
      double q_union = modularity(tp.cross, union_assignment(tp, std::nullopt));
      for (const auto& [key, raw] : links.cross) {
        (void)raw;
        double q_merged = modularity(tp.cross, union_assignment(tp, key));
        REQUIRE_THAT(q_merged - q_union,
                     Catch::Matchers::WithinAbs(delta_q(links, key.first, key.second) / links.total,
                                                1e-10));
      }
    }
  }
}

TEST_CASE("matching semantics") {
  SECTION("dominant diagonal links pair up with no events") {
    PairFixture fx;
    InterClusterLinks links = inter_cluster_links(fx.pa, fx.pb, fx.cross);
    MatchResult m = match_from_links(links, 1e-6);
    REQUIRE(m.pairs.size() == 2);
    REQUIRE(m.pairs[0].a == 0);
    REQUIRE(m.pairs[0].b == 0);
    REQUIRE(m.pairs[1].a == 1);
    REQUIRE(m.pairs[1].b == 1);
    REQUIRE(m.splits.empty());
    REQUIRE(m.merges.empty());

    // successor/predecessor equal the brute-force delta-Q argmax table
    for (std::uint32_t a = 0; a < links.clusters_a(); ++a) {
      std::optional<std::uint32_t> best;
      for (std::uint32_t b = 0; b < links.clusters_b(); ++b) {
        if (!(links.omega_norm(a, b) > 1e-6)) continue;
        if (!best || delta_q(links, a, b) > delta_q(links, a, *best)) best = b;
      }
      REQUIRE(m.successor[a] == best);
    }
  }

  SECTION("two clusters with the same predecessor produce one split") {
    SplitFixture fx;
    MatchResult m = match_periods(fx.pa, fx.pb, fx.cross, 1e-6);
    REQUIRE(m.pairs.size() == 1);
    REQUIRE(m.pairs[0].a == 0);
    REQUIRE(m.pairs[0].b == 0);
    REQUIRE(m.splits.size() == 1);
    REQUIRE(m.splits[0].a == 0);
    REQUIRE(m.splits[0].b == 1);
    REQUIRE(m.merges.empty());
  }

  SECTION("two clusters with the same successor produce one merge") {
    SplitFixture fx;  // period roles swapped
    MatchResult m = match_periods(fx.pb, fx.pa, fx.cross, 1e-6);
    REQUIRE(m.pairs.size() == 1);
    REQUIRE(m.pairs[0].a == 0);
    REQUIRE(m.pairs[0].b == 0);
    REQUIRE(m.merges.size() == 1);
    REQUIRE(m.merges[0].a == 1);
    REQUIRE(m.merges[0].b == 0);
    REQUIRE(m.splits.empty());
  }

  SECTION("similarities at or below theta yield no links at all") {
    BCGraph cross = BCGraph::from_edges(
        {{"a1", "a2", 0.5}, {"b1", "b2", 0.5}, {"a1", "b1", 4e-7}});
    // omega_norm = 4e-7 / (2*2) = 1e-7 < theta
    MatchResult m = match_periods(singleton_partition({"a1", "a2"}),
                                  singleton_partition({"b1", "b2"}), cross, 1e-6);
    REQUIRE_FALSE(m.successor[0].has_value());
    REQUIRE_FALSE(m.predecessor[0].has_value());
    REQUIRE(m.pairs.empty());
    REQUIRE(m.splits.empty());
    REQUIRE(m.merges.empty());
  }

  SECTION("pair symmetry: pairs are exactly the mutual best matches") {
    detail::Rng rng(47);
    for (int t = 0; t < 30; ++t) {
      RandomTwoPeriod tp = random_two_period(rng);
      MatchResult m = match_periods(tp.pa, tp.pb, tp.cross, 1e-9);
      std::set<std::pair<std::uint32_t, std::uint32_t>> paired;
      for (const auto& p : m.pairs) paired.insert({p.a, p.b});
      for (std::uint32_t a = 0; a < m.successor.size(); ++a)
        for (std::uint32_t b = 0; b < m.predecessor.size(); ++b) {
          bool mutual = m.successor[a] && *m.successor[a] == b && m.predecessor[b] &&
                        *m.predecessor[b] == a;
          REQUIRE(mutual == paired.count({a, b}));
        }
    }
  }

  SECTION("argmax maps are invariant under uniform weight scaling") {
    detail::Rng rng(53);
    for (int t = 0; t < 20; ++t) {
      RandomTwoPeriod tp = random_two_period(rng);
      for (double scale : {0.5, 0.25}) {
        std::vector<std::tuple<std::string, std::string, double>> scaled;
        for (const BCGraph::Edge& e : tp.cross.edges())
          scaled.emplace_back(tp.cross.node_id(e.u), tp.cross.node_id(e.v), e.w * scale);
        BCGraph cross2 = BCGraph::from_edges(scaled);
        MatchResult m1 = match_periods(tp.pa, tp.pb, tp.cross, 1e-12);
        MatchResult m2 = match_periods(tp.pa, tp.pb, cross2, 1e-12);
        REQUIRE(m1.successor == m2.successor);
        REQUIRE(m1.predecessor == m2.predecessor);
      }
    }
  }

  SECTION("combined modularity equals merging all pairs on the union partition") {
    detail::Rng rng(59);
    for (int t = 0; t < 30; ++t) {
      RandomTwoPeriod tp = random_two_period(rng);
      InterClusterLinks links = inter_cluster_links(tp.pa, tp.pb, tp.cross);
      MatchResult m = match_from_links(links, 1e-9);
      auto assignment = union_assignment(tp, std::nullopt);
      for (const auto& p : m.pairs)
        for (std::uint32_t i = 0; i < tp.pb.node_count(); ++i)
          if (tp.pb.community_of_index(i) == p.b) assignment[tp.pb.node_ids()[i]] = p.a;
      REQUIRE_THAT(combined_modularity(links, m),
                   Catch::Matchers::WithinAbs(modularity(tp.cross, assignment), 1e-10));
    }
  }
}

TEST_CASE("stream assembly") {
  auto window = [](int i) {
    TimeWindow w;
    w.start = 2000 + 5 * i;
    w.end = w.start + 5;
    w.index = i;
    return w;
  };
  auto pair_link = [](std::uint32_t a, std::uint32_t b) {
    return MatchResult::Link{a, b, 0.1, 0.2};
  };

  SECTION("a three-window chain forms a single stream") {
    std::vector<Partition> parts{singleton_partition({"p0"}), singleton_partition({"p1"}),
                                 singleton_partition({"p2"})};
    MatchResult m01, m12;
    m01.successor = {0};
    m01.predecessor = {0};
    m01.pairs = {pair_link(0, 0)};
    m12 = m01;
    StreamSet ss = build_streams({m01, m12}, parts, {window(0), window(1), window(2)});
    REQUIRE(ss.streams.size() == 1);
    REQUIRE(ss.streams[0].size() == 3);
    for (int w = 0; w < 3; ++w) REQUIRE(ss.streams[0][w].window == w);
    REQUIRE(ss.membership.at("p0") == 0);
    REQUIRE(ss.membership.at("p2") == 0);
    REQUIRE(ss.events.empty());
  }

  SECTION("a cluster with neither predecessor nor successor is a singleton stream") {
    std::vector<Partition> parts{singleton_partition({"p0"}), singleton_partition({"p1"})};
    MatchResult m;
    m.successor = {std::nullopt};
    m.predecessor = {std::nullopt};
    StreamSet ss = build_streams({m}, parts, {window(0), window(1)});
    REQUIRE(ss.streams.size() == 2);
    REQUIRE(ss.streams[0].size() == 1);
    REQUIRE(ss.streams[1].size() == 1);
  }

  SECTION("a split keeps the paired chain and opens a new stream plus one event") {
    std::vector<Partition> parts{
        singleton_partition({"x1", "x2"}),
        Partition::over_nodes({"y1", "y2"}, {{"y1", 0}, {"y2", 1}})};
    MatchResult m;
    m.successor = {0};
    m.predecessor = {0, 0};
    m.pairs = {pair_link(0, 0)};
    m.splits = {MatchResult::Link{0, 1, 0.05, 0.1}};
    StreamSet ss = build_streams({m}, parts, {window(0), window(1)});
    REQUIRE(ss.streams.size() == 2);
    REQUIRE(ss.streams[0].size() == 2);
    REQUIRE(ss.streams[1].size() == 1);
    REQUIRE(ss.events.size() == 1);
    REQUIRE(ss.events[0].type == EventType::split);
    REQUIRE(ss.events[0].boundary == 1);
    REQUIRE(ss.events[0].from_stream == 0);
    REQUIRE(ss.events[0].to_stream == 1);
    REQUIRE(ss.membership.at("y2") == 1);
  }

  SECTION("misaligned inputs are rejected") {
    std::vector<Partition> parts{singleton_partition({"p0"}), singleton_partition({"p1"})};
    REQUIRE_THROWS_AS(build_streams({}, parts, {window(0), window(1)}), ValidationError);
    MatchResult wrong;
    wrong.successor = {0, 0};  // claims two A-clusters
    wrong.predecessor = {0};
    REQUIRE_THROWS_AS(build_streams({wrong}, parts, {window(0), window(1)}), ValidationError);
  }
}

TEST_CASE("stream labeling") {
  auto window = [](int i) {
    TimeWindow w;
    w.start = 2000 + 5 * i;
    w.end = w.start + 5;
    w.index = i;
    return w;
  };

  Corpus corpus(std::vector<Publication>{{"p1", 2000, {}, "X"},
                                         {"p2", 2001, {}, "X"},
                                         {"p3", 2002, {}, "Y"},
                                         {"q1", 2000, {}, "X"},
                                         {"q2", 2001, {}, "Y"},
                                         {"r1", 2000, {}, ""}});

  SECTION("per-window mode, lexicographic ties, id fallback") {
    std::vector<Partition> parts{
        Partition::over_nodes({"p1", "p2", "p3", "q1", "q2", "r1"},
                              {{"p1", 0}, {"p2", 0}, {"p3", 0}, {"q1", 1}, {"q2", 1}, {"r1", 2}})};
    StreamSet ss = build_streams({}, parts, {window(0)});
    ss = label_streams(std::move(ss), corpus);
    REQUIRE(ss.labels.at(0).at(0) == "X");  // {X,X,Y} -> X
    REQUIRE(ss.labels.at(1).at(0) == "X");  // tie {X,Y} -> lexicographically smaller
    REQUIRE(ss.labels.at(2).at(0) == "2");  // no labels -> stream id
  }
}
