// bcstreams command-line tool: seeded stream detection over publication
// corpora, partition comparison, and synthetic corpus generation. Every run
// writes a manifest from which it can be replayed bit-identically.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bcstreams/bcstreams.hpp"

namespace fs = std::filesystem;
using bcstreams::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

struct DetectOptions {
  std::string corpus_path;
  std::string algorithm = "bclc";
  int window = 5;
  std::uint32_t runs = 100;
  std::uint64_t seed = 0;
  double theta = 1e-6;
  int min_shared_refs = 2;
  int min_stream_size = 0;
  std::string format = "jsonl";
  unsigned workers = 0;
  std::string out_dir;
  std::string from_manifest;
};

json detect_config_json(const DetectOptions& o) {
  json j;
  j["corpus"] = o.corpus_path;
  j["algorithm"] = o.algorithm;
  j["window"] = o.window;
  j["runs"] = o.runs;
  j["seed"] = o.seed;
  j["theta"] = o.theta;
  j["min_shared_refs"] = o.min_shared_refs;
  j["min_stream_size"] = o.min_stream_size;
  j["format"] = o.format;
  j["workers"] = o.workers;
  return j;
}

void write_json_file(const fs::path& path, const json& j) {
  bcstreams::write_text_file(path, j.dump(2) + "\n");
}

json manifest_skeleton(const std::string& command) {
  json j;
  j["schema"] = "bcstreams-manifest-v1";
  j["version"] = bcstreams::kVersion;
  j["command"] = command;
  return j;
}

DetectOptions options_from_manifest(const fs::path& manifest_path, const std::string& out_dir) {
  json j;
  try {
    j = json::parse(bcstreams::read_text_file(manifest_path));
  } catch (const json::exception& e) {
    throw bcstreams::ParseError("invalid manifest JSON: " + std::string(e.what()));
  }
  if (j.value("command", "") != "detect")
    throw bcstreams::ValidationError("manifest does not describe a detect run");

  DetectOptions o;
  const json& c = j.at("config");
  o.corpus_path = c.at("corpus").get<std::string>();
  o.algorithm = c.at("algorithm").get<std::string>();
  o.window = c.at("window").get<int>();
  o.runs = c.at("runs").get<std::uint32_t>();
  o.seed = c.at("seed").get<std::uint64_t>();
  o.theta = c.at("theta").get<double>();
  o.min_shared_refs = c.at("min_shared_refs").get<int>();
  o.min_stream_size = c.at("min_stream_size").get<int>();
  o.format = c.at("format").get<std::string>();
  o.workers = c.at("workers").get<unsigned>();
  o.out_dir = out_dir;

  for (const auto& input : j.at("inputs")) {
    std::string path = input.at("path").get<std::string>();
    std::string recorded = input.at("fnv1a64").get<std::string>();
    std::string actual = bcstreams::digest_file(path);
    if (actual != recorded)
      throw bcstreams::ValidationError("input digest mismatch for " + path + ": manifest " +
                                       recorded + ", file " + actual);
  }
  return o;
}

int cmd_detect(const DetectOptions& opts_in) {
  DetectOptions opts = opts_in;
  if (!opts.from_manifest.empty())
    opts = options_from_manifest(opts.from_manifest, opts_in.out_dir);

  auto algorithm = bcstreams::parse_algorithm(opts.algorithm);
  if (!algorithm) throw bcstreams::ValidationError("unknown algorithm: " + opts.algorithm);
  auto format = bcstreams::parse_corpus_format(opts.format);
  if (!format) throw bcstreams::ValidationError("unknown corpus format: " + opts.format);

  bcstreams::AlgorithmConfig cfg;
  cfg.algorithm = *algorithm;
  cfg.delta_t = opts.window;
  cfg.n_runs = opts.runs;
  cfg.base_seed = opts.seed;
  cfg.theta = opts.theta;
  cfg.min_shared_refs = opts.min_shared_refs;
  cfg.workers = opts.workers;
  cfg.validate();

  bcstreams::Corpus corpus = bcstreams::load_corpus_file(opts.corpus_path, *format);
  bcstreams::DetectionResult result = bcstreams::detect(corpus, cfg);

  fs::create_directories(opts.out_dir);
  fs::path streams_path = fs::path(opts.out_dir) / "streams.json";
  fs::path report_path = fs::path(opts.out_dir) / "run_report.json";
  fs::path manifest_path = fs::path(opts.out_dir) / "manifest.json";

  write_json_file(streams_path,
                  bcstreams::streams_to_json(result.streams, corpus, opts.algorithm,
                                             opts.min_stream_size));
  write_json_file(report_path, bcstreams::run_report_to_json(result.report));

  json manifest = manifest_skeleton("detect");
  manifest["config"] = detect_config_json(opts);
  manifest["inputs"] = json::array(
      {json{{"path", opts.corpus_path}, {"fnv1a64", bcstreams::digest_file(opts.corpus_path)}}});
  manifest["outputs"] = json::array({"streams.json", "run_report.json"});
  write_json_file(manifest_path, manifest);

  std::printf("detect %s: %zu streams, %zu events -> %s\n", opts.algorithm.c_str(),
              result.streams.streams.size(), result.streams.events.size(),
              streams_path.string().c_str());
  for (const std::string& w : result.report.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  return kExitOk;
}

int cmd_compare(const std::string& path_x, const std::string& path_y, const std::string& out_dir) {
  bcstreams::LoadedPartition x = bcstreams::load_partition_any(path_x);
  bcstreams::LoadedPartition y = bcstreams::load_partition_any(path_y);

  json report = bcstreams::comparison_report_json(x.partition, y.partition, path_x, path_y);

  auto [rx, ry] = bcstreams::restrict_to_shared(x.partition, y.partition);
  bcstreams::BipartiteStreamGraph g = bcstreams::bipartite_graph(rx, ry);
  auto labels_of = [](const bcstreams::LoadedPartition& p) {
    std::map<std::string, std::string> labels;
    if (p.stream_file)
      for (const auto& s : p.stream_file->streams)
        if (!s.label.empty()) labels.emplace(std::to_string(s.id), s.label);
    return labels;
  };
  json bipartite = bcstreams::bipartite_to_json(g, labels_of(x), labels_of(y));

  fs::create_directories(out_dir);
  write_json_file(fs::path(out_dir) / "compare_report.json", report);
  write_json_file(fs::path(out_dir) / "bipartite.json", bipartite);

  json manifest = manifest_skeleton("compare");
  manifest["config"] = json{{"x", path_x}, {"y", path_y}};
  manifest["inputs"] =
      json::array({json{{"path", path_x}, {"fnv1a64", bcstreams::digest_file(path_x)}},
                   json{{"path", path_y}, {"fnv1a64", bcstreams::digest_file(path_y)}}});
  manifest["outputs"] = json::array({"compare_report.json", "bipartite.json"});
  write_json_file(fs::path(out_dir) / "manifest.json", manifest);

  std::printf("compare: mi=%s nmi=%s -> %s\n", report["mi"].dump().c_str(),
              report["nmi"].dump().c_str(), (fs::path(out_dir) / "compare_report.json").string().c_str());
  return kExitOk;
}

int cmd_synth(const std::string& scenario_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
  bcstreams::PlantedScenario scenario = bcstreams::load_scenario_file(scenario_path);
  if (seed_override) scenario.seed = *seed_override;

  auto [corpus, truth] = bcstreams::generate(scenario);

  fs::create_directories(out_dir);
  fs::path corpus_path = fs::path(out_dir) / "corpus.jsonl";
  bcstreams::save_corpus_file(corpus_path, corpus, bcstreams::CorpusFormat::jsonl);

  bcstreams::StreamPartition truth_partition;
  truth_partition.assignment = truth.membership;
  std::ostringstream tsv;
  bcstreams::save_reference_partition(tsv, truth_partition);
  bcstreams::write_text_file(fs::path(out_dir) / "truth_partition.tsv", tsv.str());
  write_json_file(fs::path(out_dir) / "ground_truth.json", bcstreams::truth_to_json(truth));

  json manifest = manifest_skeleton("synth");
  manifest["config"] = json{{"scenario", scenario_path}, {"seed", scenario.seed}};
  manifest["inputs"] = json::array(
      {json{{"path", scenario_path}, {"fnv1a64", bcstreams::digest_file(scenario_path)}}});
  manifest["outputs"] = json::array({"corpus.jsonl", "truth_partition.tsv", "ground_truth.json"});
  write_json_file(fs::path(out_dir) / "manifest.json", manifest);

  std::printf("synth: %zu publications, %zu planted events -> %s\n", corpus.size(),
              truth.events.size(), corpus_path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal stream detection over bibliographic-coupling networks"};
  app.require_subcommand(1);

  DetectOptions det;
  CLI::App* detect = app.add_subcommand("detect", "Detect historical streams in a corpus");
  detect->add_option("corpus", det.corpus_path, "Corpus file (JSONL, or TSV with --format tsv)");
  detect->add_option("--algorithm", det.algorithm, "ga | gpa | bmla | bclc")->capture_default_str();
  detect->add_option("--window", det.window, "Window width in years")->capture_default_str();
  detect->add_option("--runs", det.runs, "Louvain runs per ensemble")->capture_default_str();
  detect->add_option("--seed", det.seed, "Base random seed")->capture_default_str();
  detect->add_option("--theta", det.theta, "Minimum normalized cluster similarity")
      ->capture_default_str();
  detect->add_option("--min-shared-refs", det.min_shared_refs, "Shared references per link")
      ->capture_default_str();
  detect->add_option("--min-stream-size", det.min_stream_size,
                     "Display filter: drop exported streams smaller than this")
      ->capture_default_str();
  detect->add_option("--format", det.format, "Corpus input format: jsonl | tsv")
      ->capture_default_str();
  detect->add_option("--workers", det.workers, "Worker thread cap (0 = all cores)")
      ->capture_default_str();
  detect->add_option("--out", det.out_dir, "Output directory")->required();
  detect->add_option("--from-manifest", det.from_manifest,
                     "Replay a previous run from its manifest (verifies input digests)");

  std::string cmp_x, cmp_y, cmp_out;
  CLI::App* compare = app.add_subcommand("compare", "Compare two stream partitions");
  compare->add_option("streams_x", cmp_x, "Stream export or reference partition file")->required();
  compare->add_option("streams_y", cmp_y, "Stream export or reference partition file")->required();
  compare->add_option("--out", cmp_out, "Output directory")->required();

  std::string synth_scenario, synth_out;
  std::optional<std::uint64_t> synth_seed;
  CLI::App* synth = app.add_subcommand("synth", "Generate a corpus from a planted scenario");
  synth->add_option("scenario", synth_scenario, "Scenario file (JSON)")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (detect->parsed()) {
      if (det.corpus_path.empty() && det.from_manifest.empty())
        throw bcstreams::ValidationError("either a corpus path or --from-manifest is required");
      return cmd_detect(det);
    }
    if (compare->parsed()) return cmd_compare(cmp_x, cmp_y, cmp_out);
    if (synth->parsed()) return cmd_synth(synth_scenario, synth_out, synth_seed);
  } catch (const bcstreams::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const bcstreams::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const bcstreams::UndefinedMeasureError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
