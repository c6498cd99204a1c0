#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "bcstreams/bcstreams.hpp"
#include "oracles.hpp"

using namespace bcstreams;
namespace fs = std::filesystem;

#ifndef BCSTREAMS_CLI_PATH
#error "BCSTREAMS_CLI_PATH must point at the CLI binary"
#endif

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(BCSTREAMS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("bcstreams_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

PlantedScenario small_scenario() {
  PlantedScenario sc;
  sc.windows = 3;
  sc.delta_t = 5;
  sc.refs_per_pub = 8;
  sc.noise = 0.0;
  sc.pool_drift = 0.1;
  sc.seed = 11;
  sc.streams = {{"one", 0, 2, 12, {}, 18, "rho"}, {"two", 0, 2, 12, {}, 18, "sigma"}};
  return sc;
}

}  // namespace

TEST_CASE("partition export round-trips") {
  detail::Rng rng(111);
  BCGraph g = oracle::random_graph(rng, 12);
  Partition p = louvain(g, 9);
  json j = partition_to_json(p);
  PartitionFileData back = partition_from_json(j);
  REQUIRE(back.graph_digest == detail::hex_digest(g.digest()));
  REQUIRE(back.communities == p.community_count());
  REQUIRE(back.modularity == p.modularity());
  REQUIRE(back.seed == p.seed());
  REQUIRE(back.assignment.size() == p.node_count());
  for (std::uint32_t i = 0; i < p.node_count(); ++i)
    REQUIRE(back.assignment.at(p.node_ids()[i]) == p.community_of_index(i));
}

TEST_CASE("stream file round-trips into a partition") {
  auto [corpus, truth] = generate(small_scenario());
  AlgorithmConfig cfg;
  cfg.algorithm = Algorithm::bmla;
  cfg.n_runs = 3;
  cfg.workers = 2;
  DetectionResult r = run_bmla(corpus, cfg);
  json j = streams_to_json(r.streams, corpus, "bmla");
  StreamFileData data = streams_from_json(j);
  REQUIRE(data.algorithm == "bmla");
  REQUIRE(data.windows.size() == r.streams.windows.size());
  StreamPartition p = data.to_partition();
  REQUIRE(p.size() == r.streams.membership.size());
  for (const auto& [pub, sid] : r.streams.membership)
    REQUIRE(p.assignment.at(pub) == std::to_string(sid));
}

TEST_CASE("scenario JSON round-trips") {
  PlantedScenario sc = small_scenario();
  sc.events = {};
  PlantedScenario back = scenario_from_json(scenario_to_json(sc));
  REQUIRE(back.windows == sc.windows);
  REQUIRE(back.seed == sc.seed);
  REQUIRE(back.streams.size() == sc.streams.size());
  REQUIRE(back.streams[0].pool_size == sc.streams[0].pool_size);
  auto [c1, t1] = generate(sc);
  auto [c2, t2] = generate(back);
  REQUIRE(t1.membership == t2.membership);
}

TEST_CASE("reference partition parsing") {
  std::istringstream in("# comment\np1\talpha\np2\tbeta\n\np3\talpha\n");
  StreamPartition p = load_reference_partition(in);
  REQUIRE(p.size() == 3);
  REQUIRE(p.assignment.at("p3") == "alpha");

  std::istringstream dup("p1\ta\np1\tb\n");
  REQUIRE_THROWS_AS(load_reference_partition(dup), ParseError);
  std::istringstream bad("p1 no-tab\n");
  REQUIRE_THROWS_AS(load_reference_partition(bad), ParseError);
}

TEST_CASE("cli synth + detect + compare pipeline") {
  TempDir dir("pipeline");
  write_text_file(dir / "scenario.json", scenario_to_json(small_scenario()).dump(2));

  SECTION("synth writes a loadable corpus and truth files") {
    REQUIRE(run_cli("synth " + (dir / "scenario.json") + " --out " + (dir / "synth")) == 0);
    REQUIRE(fs::exists(dir.path / "synth" / "corpus.jsonl"));
    REQUIRE(fs::exists(dir.path / "synth" / "truth_partition.tsv"));
    REQUIRE(fs::exists(dir.path / "synth" / "ground_truth.json"));
    Corpus corpus = load_corpus_file(dir.path / "synth" / "corpus.jsonl", CorpusFormat::jsonl);
    REQUIRE(corpus.size() == 72);  // 2 streams x 3 windows x 12
    json manifest = json::parse(read_text_file(dir.path / "synth" / "manifest.json"));
    REQUIRE(manifest["config"]["seed"] == 11);
  }

  SECTION("detect runs every algorithm and reruns bit-identically from the manifest") {
    REQUIRE(run_cli("synth " + (dir / "scenario.json") + " --out " + (dir / "synth")) == 0);
    std::string corpus_path = dir / "synth/corpus.jsonl";
    for (std::string algo : {"ga", "gpa", "bmla", "bclc"}) {
      std::string out1 = dir / ("det_" + algo);
      std::string out2 = dir / ("det_" + algo + "_replay");
      REQUIRE(run_cli("detect " + corpus_path + " --algorithm " + algo +
                      " --window 5 --runs 4 --seed 42 --out " + out1) == 0);
      REQUIRE(run_cli("detect --from-manifest " + out1 + "/manifest.json --out " + out2) == 0);
      REQUIRE(read_text_file(fs::path(out1) / "streams.json") ==
              read_text_file(fs::path(out2) / "streams.json"));
    }
  }

  SECTION("compare of a stream file with itself is the identity") {
    REQUIRE(run_cli("synth " + (dir / "scenario.json") + " --out " + (dir / "synth")) == 0);
    REQUIRE(run_cli("detect " + (dir / "synth/corpus.jsonl") +
                    " --algorithm bclc --runs 3 --seed 1 --out " + (dir / "det")) == 0);
    REQUIRE(run_cli("compare " + (dir / "det/streams.json") + " " + (dir / "det/streams.json") +
                    " --out " + (dir / "cmp")) == 0);
    json report = json::parse(read_text_file(dir.path / "cmp" / "compare_report.json"));
    REQUIRE_THAT(report["nmi"].get<double>(), Catch::Matchers::WithinAbs(1.0, 1e-9));
    REQUIRE(report["first_edge"]["x_to_y"]["mean"] == 1.0);
    REQUIRE(report["first_edge"]["x_to_y"]["stddev"] == 0.0);
    REQUIRE(report["sum80"]["x_to_y"]["mean"] == 1.0);
    REQUIRE(fs::exists(dir.path / "cmp" / "bipartite.json"));
  }

  SECTION("compare against a reference partition file") {
    REQUIRE(run_cli("synth " + (dir / "scenario.json") + " --out " + (dir / "synth")) == 0);
    REQUIRE(run_cli("detect " + (dir / "synth/corpus.jsonl") +
                    " --algorithm bclc --runs 3 --seed 1 --out " + (dir / "det")) == 0);
    REQUIRE(run_cli("compare " + (dir / "det/streams.json") + " " +
                    (dir / "synth/truth_partition.tsv") + " --out " + (dir / "cmp_ref")) == 0);
    json report = json::parse(read_text_file(dir.path / "cmp_ref" / "compare_report.json"));
    REQUIRE(report.contains("nmi_x"));
    REQUIRE(report.contains("nmi_y"));
    REQUIRE(report["restriction"]["shared"].get<std::size_t>() > 0);
    // the zero-noise fixture is fully recoverable
    REQUIRE_THAT(report["nmi"].get<double>(), Catch::Matchers::WithinAbs(1.0, 1e-9));
  }

  SECTION("error paths exit with status 2") {
    REQUIRE(run_cli("detect missing.jsonl --algorithm bclc --out " + (dir / "x")) == 2);
    REQUIRE(run_cli("synth " + (dir / "scenario.json") + " --out " + (dir / "s2")) == 0);
    REQUIRE(run_cli("detect " + (dir / "s2/corpus.jsonl") + " --algorithm wavelet --out " +
                    (dir / "x")) == 2);
    // disjoint universes
    write_text_file(dir / "refA.tsv", "pA\t1\n");
    write_text_file(dir / "refB.tsv", "pB\t1\n");
    REQUIRE(run_cli("compare " + (dir / "refA.tsv") + " " + (dir / "refB.tsv") + " --out " +
                    (dir / "x")) == 2);
    // infeasible scenario
    PlantedScenario bad = small_scenario();
    bad.streams[0].pool_size = 3;
    write_text_file(dir / "bad.json", scenario_to_json(bad).dump(2));
    REQUIRE(run_cli("synth " + (dir / "bad.json") + " --out " + (dir / "x")) == 2);
  }

  SECTION("undefined NMI is reported as null, not an error") {
    write_text_file(dir / "flat.tsv", "p1\tonly\np2\tonly\n");
    write_text_file(dir / "split.tsv", "p1\ta\np2\tb\n");
    REQUIRE(run_cli("compare " + (dir / "flat.tsv") + " " + (dir / "split.tsv") + " --out " +
                    (dir / "cmp_flat")) == 0);
    json report = json::parse(read_text_file(dir.path / "cmp_flat" / "compare_report.json"));
    REQUIRE(report["nmi_x"].is_null());  // H(X) = 0
    REQUIRE(report["nmi"].is_null());
    REQUIRE(report["nmi_y"].is_number());
    REQUIRE(report["mi"] == 0.0);
  }

  SECTION("scenario seed defaults to zero and is recorded") {
    json sj = scenario_to_json(small_scenario());
    sj.erase("seed");
    write_text_file(dir / "noseed.json", sj.dump(2));
    REQUIRE(run_cli("synth " + (dir / "noseed.json") + " --out " + (dir / "ns")) == 0);
    json manifest = json::parse(read_text_file(dir.path / "ns" / "manifest.json"));
    REQUIRE(manifest["config"]["seed"] == 0);
  }

  SECTION("min-stream-size filters the export only") {
    REQUIRE(run_cli("synth " + (dir / "scenario.json") + " --out " + (dir / "synth")) == 0);
    REQUIRE(run_cli("detect " + (dir / "synth/corpus.jsonl") +
                    " --algorithm bclc --runs 3 --seed 1 --min-stream-size 100000 --out " +
                    (dir / "det_filtered")) == 0);
    json filtered = json::parse(read_text_file(dir.path / "det_filtered" / "streams.json"));
    REQUIRE(filtered["streams"].empty());
  }

  SECTION("tsv corpus input") {
    auto [corpus, truth] = generate(small_scenario());
    save_corpus_file(dir / "corpus.tsv", corpus, CorpusFormat::tsv);
    REQUIRE(run_cli("detect " + (dir / "corpus.tsv") +
                    " --format tsv --algorithm ga --runs 2 --seed 3 --out " + (dir / "det_tsv")) ==
            0);
    json streams = json::parse(read_text_file(dir.path / "det_tsv" / "streams.json"));
    REQUIRE(streams["algorithm"] == "ga");
    REQUIRE(streams["streams"].size() == 2);
  }
}
