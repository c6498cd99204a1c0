#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bcstreams/algorithms.hpp"
#include "bcstreams/compare.hpp"
#include "bcstreams/corpus.hpp"
#include "bcstreams/detail/hash.hpp"
#include "bcstreams/errors.hpp"
#include "bcstreams/matching.hpp"
#include "bcstreams/partition.hpp"
#include "bcstreams/synth.hpp"

namespace bcstreams {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// plain file helpers

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << content;
}

inline std::string digest_file(const std::filesystem::path& path) {
  return detail::hex_digest(detail::fnv1a64(read_text_file(path)));
}

// ---------------------------------------------------------------------------
// corpus records: one publication per line, JSONL by default, TSV alternative
// (id <TAB> year <TAB> ref1;ref2;... <TAB> label)

enum class CorpusFormat { jsonl, tsv };

inline std::optional<CorpusFormat> parse_corpus_format(const std::string& s) {
  if (s == "jsonl") return CorpusFormat::jsonl;
  if (s == "tsv") return CorpusFormat::tsv;
  return std::nullopt;
}

namespace detail {

inline Publication parse_jsonl_record(const std::string& line, long line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON record: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("record is not a JSON object", line_no);
  if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
    throw ParseError("record needs a non-empty string field 'id'", line_no);
  if (!j.contains("year") || !j["year"].is_number_integer())
    throw ParseError("record needs an integer field 'year'", line_no);

  Publication p;
  p.id = j["id"].get<std::string>();
  p.year = j["year"].get<int>();
  if (j.contains("refs")) {
    if (!j["refs"].is_array()) throw ParseError("'refs' must be an array of strings", line_no);
    for (const auto& r : j["refs"]) {
      if (!r.is_string()) throw ParseError("'refs' must be an array of strings", line_no);
      p.refs.push_back(r.get<std::string>());
    }
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError("'label' must be a string", line_no);
    p.label = j["label"].get<std::string>();
  }
  return p;
}

inline Publication parse_tsv_record(const std::string& line, long line_no) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (cols.size() < 2 || cols.size() > 4)
    throw ParseError("expected 2-4 tab-separated columns (id, year, refs, label)", line_no);
  if (cols[0].empty()) throw ParseError("empty publication id", line_no);

  Publication p;
  p.id = cols[0];
  try {
    std::size_t used = 0;
    p.year = std::stoi(cols[1], &used);
    if (used != cols[1].size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ParseError("year is not an integer: '" + cols[1] + "'", line_no);
  }
  if (cols.size() >= 3 && !cols[2].empty()) {
    std::size_t pos = 0;
    while (true) {
      std::size_t semi = cols[2].find(';', pos);
      std::string ref = cols[2].substr(pos, semi == std::string::npos ? semi : semi - pos);
      if (!ref.empty()) p.refs.push_back(ref);
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
  }
  if (cols.size() == 4) p.label = cols[3];
  return p;
}

}  // namespace detail

inline Corpus load_corpus(std::istream& in, CorpusFormat format) {
  std::vector<Publication> pubs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    pubs.push_back(format == CorpusFormat::jsonl ? detail::parse_jsonl_record(line, line_no)
                                                 : detail::parse_tsv_record(line, line_no));
  }
  return Corpus(std::move(pubs));
}

inline Corpus load_corpus_file(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus file: " + path.string());
  return load_corpus(in, format);
}

inline void save_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format) {
  for (const Publication& p : corpus.publications()) {
    if (format == CorpusFormat::jsonl) {
      json j;
      j["id"] = p.id;
      j["year"] = p.year;
      j["refs"] = p.refs;
      if (!p.label.empty()) j["label"] = p.label;
      out << j.dump() << '\n';
    } else {
      auto check = [](const std::string& s, const char* what) {
        if (s.find('\t') != std::string::npos || s.find('\n') != std::string::npos ||
            s.find(';') != std::string::npos)
          throw ValidationError(std::string(what) + " contains a TSV delimiter: " + s);
      };
      check(p.id, "publication id");
      out << p.id << '\t' << p.year << '\t';
      for (std::size_t i = 0; i < p.refs.size(); ++i) {
        check(p.refs[i], "reference id");
        if (i) out << ';';
        out << p.refs[i];
      }
      if (!p.label.empty()) {
        check(p.label, "label");
        out << '\t' << p.label;
      }
      out << '\n';
    }
  }
}

inline void save_corpus_file(const std::filesystem::path& path, const Corpus& corpus,
                             CorpusFormat format) {
  std::ostringstream ss;
  save_corpus(ss, corpus, format);
  write_text_file(path, ss.str());
}

// ---------------------------------------------------------------------------
// partition export: (node id, community id) pairs plus metadata

inline json partition_to_json(const Partition& p) {
  json assignment = json::array();
  for (std::uint32_t i = 0; i < p.node_count(); ++i)
    assignment.push_back(json::array({p.node_ids()[i], p.community_of_index(i)}));
  json j;
  j["schema"] = "bcstreams-partition-v1";
  j["graph_digest"] = detail::hex_digest(p.graph_digest());
  j["communities"] = p.community_count();
  j["modularity"] = p.modularity();
  if (p.seed()) j["seed"] = *p.seed();
  j["assignment"] = std::move(assignment);
  return j;
}

struct PartitionFileData {
  std::string graph_digest;
  std::uint32_t communities = 0;
  double modularity = 0.0;
  std::optional<std::uint64_t> seed;
  std::unordered_map<std::string, std::uint32_t> assignment;
};

inline PartitionFileData partition_from_json(const json& j) {
  PartitionFileData out;
  try {
    out.graph_digest = j.at("graph_digest").get<std::string>();
    out.communities = j.at("communities").get<std::uint32_t>();
    out.modularity = j.at("modularity").get<double>();
    if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
    for (const auto& entry : j.at("assignment"))
      out.assignment.emplace(entry.at(0).get<std::string>(), entry.at(1).get<std::uint32_t>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid partition file: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// stream export

namespace detail {

inline json window_to_json(const TimeWindow& w) {
  json j;
  j["index"] = w.index;
  j["start"] = w.start;
  j["end"] = w.end;
  j["partial"] = w.partial;
  return j;
}

inline TimeWindow window_from_json(const json& j) {
  TimeWindow w;
  w.index = j.at("index").get<int>();
  w.start = j.at("start").get<int>();
  w.end = j.at("end").get<int>();
  w.partial = j.at("partial").get<bool>();
  return w;
}

}  // namespace detail

/// Serializes a stream set. `min_stream_size` is a display filter: streams with
/// fewer publications are omitted together with their events; metrics upstream
/// are always computed on the unfiltered set.
inline json streams_to_json(const StreamSet& ss, const Corpus& corpus, const std::string& algorithm,
                            int min_stream_size = 0) {
  std::map<int, std::vector<std::string>> members;
  for (const auto& [pub, sid] : ss.membership) members[sid].push_back(pub);

  std::vector<bool> kept(ss.streams.size(), true);
  if (min_stream_size > 0)
    for (std::size_t s = 0; s < ss.streams.size(); ++s) {
      auto it = members.find(static_cast<int>(s));
      std::size_t n = it == members.end() ? 0 : it->second.size();
      kept[s] = n >= static_cast<std::size_t>(min_stream_size);
    }

  json streams = json::array();
  for (std::size_t s = 0; s < ss.streams.size(); ++s) {
    if (!kept[s]) continue;
    json js;
    js["id"] = s;
    json chain = json::array();
    for (const StreamChainLink& link : ss.streams[s])
      chain.push_back(json{{"window", link.window}, {"cluster", link.cluster}});
    js["chain"] = std::move(chain);

    json window_labels = json::object();
    std::map<std::string, std::size_t> label_votes;
    auto it_labels = ss.labels.find(static_cast<int>(s));
    if (it_labels != ss.labels.end())
      for (const auto& [w, label] : it_labels->second) window_labels[std::to_string(w)] = label;
    js["window_labels"] = std::move(window_labels);

    json pubs = json::array();
    std::map<std::string, std::size_t> yearly;
    auto it_members = members.find(static_cast<int>(s));
    if (it_members != members.end())
      for (const std::string& pub : it_members->second) {
        pubs.push_back(pub);
        const Publication& p = corpus.at(*corpus.index_of(pub));
        ++yearly[std::to_string(p.year)];
        if (!p.label.empty()) ++label_votes[p.label];
      }
    js["publications"] = std::move(pubs);
    js["size"] = it_members == members.end() ? 0 : it_members->second.size();
    json yearly_json = json::object();
    for (const auto& [year, n] : yearly) yearly_json[year] = n;
    js["yearly_counts"] = std::move(yearly_json);

    std::string label = std::to_string(s);
    std::size_t best = 0;
    for (const auto& [l, n] : label_votes)
      if (n > best) {
        label = l;
        best = n;
      }
    js["label"] = label;
    streams.push_back(std::move(js));
  }

  json events = json::array();
  for (const StreamEvent& e : ss.events) {
    if (!kept[static_cast<std::size_t>(e.from_stream)] || !kept[static_cast<std::size_t>(e.to_stream)])
      continue;
    json je;
    je["boundary"] = e.boundary;
    je["type"] = to_string(e.type);
    je["from_stream"] = e.from_stream;
    je["to_stream"] = e.to_stream;
    je["delta_q"] = e.dq;
    je["omega"] = e.omega;
    je["non_positive_dq"] = e.dq <= 0.0;
    events.push_back(std::move(je));
  }

  json windows = json::array();
  for (const TimeWindow& w : ss.windows) windows.push_back(detail::window_to_json(w));

  json j;
  j["schema"] = "bcstreams-streams-v1";
  j["algorithm"] = algorithm;
  j["windows"] = std::move(windows);
  j["streams"] = std::move(streams);
  j["events"] = std::move(events);
  return j;
}

struct StreamFileEntry {
  int id = 0;
  std::string label;
  std::vector<std::string> publications;
};

struct StreamFileData {
  std::string algorithm;
  std::vector<TimeWindow> windows;
  std::vector<StreamFileEntry> streams;
  std::vector<StreamEvent> events;

  StreamPartition to_partition() const {
    StreamPartition p;
    for (const StreamFileEntry& s : streams)
      for (const std::string& pub : s.publications) {
        if (!p.assignment.emplace(pub, std::to_string(s.id)).second)
          throw ValidationError("publication assigned to two streams: " + pub);
      }
    return p;
  }
};

inline StreamFileData streams_from_json(const json& j) {
  StreamFileData out;
  try {
    if (j.at("schema").get<std::string>() != "bcstreams-streams-v1")
      throw ValidationError("unexpected stream file schema");
    out.algorithm = j.at("algorithm").get<std::string>();
    for (const auto& jw : j.at("windows")) out.windows.push_back(detail::window_from_json(jw));
    for (const auto& js : j.at("streams")) {
      StreamFileEntry e;
      e.id = js.at("id").get<int>();
      e.label = js.value("label", "");
      for (const auto& p : js.at("publications")) e.publications.push_back(p.get<std::string>());
      out.streams.push_back(std::move(e));
    }
    for (const auto& je : j.at("events")) {
      StreamEvent e;
      e.boundary = je.at("boundary").get<int>();
      e.type = je.at("type").get<std::string>() == "split" ? EventType::split : EventType::merge;
      e.from_stream = je.at("from_stream").get<int>();
      e.to_stream = je.at("to_stream").get<int>();
      e.dq = je.at("delta_q").get<double>();
      e.omega = je.at("omega").get<double>();
      out.events.push_back(e);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid stream file: ") + e.what());
  }
  return out;
}

inline StreamFileData load_streams_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return streams_from_json(j);
}

// ---------------------------------------------------------------------------
// run report

inline json run_report_to_json(const RunReport& r) {
  json j;
  j["schema"] = "bcstreams-report-v1";
  j["algorithm"] = r.algorithm;
  if (r.global_q) {
    json g;
    g["q"] = *r.global_q;
    if (r.global_seed) g["seed"] = *r.global_seed;
    g["graph_nodes"] = r.global_nodes;
    g["excluded"] = r.global_excluded;
    j["global"] = std::move(g);
  }
  json windows = json::array();
  for (const WindowReport& w : r.windows) {
    json jw;
    jw["window"] = w.window;
    jw["start"] = w.span.start;
    jw["end"] = w.span.end;
    jw["partial"] = w.span.partial;
    jw["population"] = w.population;
    if (w.graph_nodes) jw["graph_nodes"] = *w.graph_nodes;
    if (w.excluded) jw["excluded"] = *w.excluded;
    if (w.q) jw["q"] = *w.q;
    if (w.seed) jw["seed"] = *w.seed;
    if (w.in_global) jw["in_global"] = *w.in_global;
    if (w.loss_fraction) jw["loss_fraction"] = *w.loss_fraction;
    windows.push_back(std::move(jw));
  }
  j["windows"] = std::move(windows);
  json boundaries = json::array();
  for (const BoundaryReport& b : r.boundaries) {
    json jb;
    jb["boundary"] = b.boundary;
    if (b.combined_q) jb["combined_q"] = *b.combined_q;
    jb["pairs"] = b.pairs;
    jb["splits"] = b.splits;
    jb["merges"] = b.merges;
    jb["evaluations"] = b.evaluations;
    if (b.cross_origin_pairs) jb["cross_origin_pairs"] = *b.cross_origin_pairs;
    jb["non_positive_dq_pairs"] = b.nonpositive_dq_pairs;
    boundaries.push_back(std::move(jb));
  }
  j["boundaries"] = std::move(boundaries);
  j["matching_evaluations"] = r.matching_evaluations;
  j["warnings"] = r.warnings;
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// planted scenarios and ground truth

inline PlantedScenario scenario_from_json(const json& j) {
  PlantedScenario sc;
  try {
    sc.windows = j.at("windows").get<int>();
    sc.delta_t = j.value("delta_t", 5);
    sc.start_year = j.value("start_year", 2000);
    sc.refs_per_pub = j.value("refs_per_pub", 8);
    sc.noise = j.value("noise", 0.0);
    sc.pool_drift = j.value("pool_drift", 0.0);
    sc.seed = j.value("seed", static_cast<std::uint64_t>(0));
    for (const auto& js : j.at("streams")) {
      PlantedStream s;
      s.id = js.at("id").get<std::string>();
      s.first_window = js.at("first_window").get<int>();
      s.last_window = js.at("last_window").get<int>();
      if (js.contains("pubs_schedule"))
        for (const auto& v : js["pubs_schedule"]) s.pubs_schedule.push_back(v.get<int>());
      else
        s.pubs_per_window = js.at("pubs_per_window").get<int>();
      s.pool_size = js.at("pool_size").get<int>();
      s.label = js.value("label", "");
      sc.streams.push_back(std::move(s));
    }
    if (j.contains("events"))
      for (const auto& je : j["events"]) {
        PlantedEvent e;
        e.boundary = je.at("boundary").get<int>();
        auto type = parse_planted_event_type(je.at("type").get<std::string>());
        if (!type) throw ValidationError("unknown event type: " + je.at("type").get<std::string>());
        e.type = *type;
        if (je.contains("from"))
          for (const auto& v : je["from"]) e.from.push_back(v.get<std::string>());
        if (je.contains("to"))
          for (const auto& v : je["to"]) e.to.push_back(v.get<std::string>());
        sc.events.push_back(std::move(e));
      }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid scenario: ") + e.what());
  }
  return sc;
}

inline json scenario_to_json(const PlantedScenario& sc) {
  json streams = json::array();
  for (const PlantedStream& s : sc.streams) {
    json js;
    js["id"] = s.id;
    js["first_window"] = s.first_window;
    js["last_window"] = s.last_window;
    if (!s.pubs_schedule.empty())
      js["pubs_schedule"] = s.pubs_schedule;
    else
      js["pubs_per_window"] = s.pubs_per_window;
    js["pool_size"] = s.pool_size;
    if (!s.label.empty()) js["label"] = s.label;
    streams.push_back(std::move(js));
  }
  json events = json::array();
  for (const PlantedEvent& e : sc.events) {
    json je;
    je["boundary"] = e.boundary;
    je["type"] = to_string(e.type);
    if (!e.from.empty()) je["from"] = e.from;
    if (!e.to.empty()) je["to"] = e.to;
    events.push_back(std::move(je));
  }
  json j;
  j["windows"] = sc.windows;
  j["delta_t"] = sc.delta_t;
  j["start_year"] = sc.start_year;
  j["refs_per_pub"] = sc.refs_per_pub;
  j["noise"] = sc.noise;
  j["pool_drift"] = sc.pool_drift;
  j["seed"] = sc.seed;
  j["streams"] = std::move(streams);
  j["events"] = std::move(events);
  return j;
}

inline PlantedScenario load_scenario_file(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

inline json truth_to_json(const GroundTruth& truth) {
  json membership = json::object();
  for (const auto& [pub, stream] : truth.membership) membership[pub] = stream;
  json events = json::array();
  for (const PlantedEvent& e : truth.events) {
    json je;
    je["boundary"] = e.boundary;
    je["type"] = to_string(e.type);
    je["from"] = e.from;
    je["to"] = e.to;
    events.push_back(std::move(je));
  }
  json j;
  j["schema"] = "bcstreams-truth-v1";
  j["membership"] = std::move(membership);
  j["events"] = std::move(events);
  return j;
}

inline GroundTruth truth_from_json(const json& j) {
  GroundTruth out;
  try {
    for (const auto& [pub, stream] : j.at("membership").items())
      out.membership.emplace(pub, stream.get<std::string>());
    for (const auto& je : j.at("events")) {
      PlantedEvent e;
      e.boundary = je.at("boundary").get<int>();
      e.type = *parse_planted_event_type(je.at("type").get<std::string>());
      for (const auto& v : je.at("from")) e.from.push_back(v.get<std::string>());
      for (const auto& v : je.at("to")) e.to.push_back(v.get<std::string>());
      out.events.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid ground truth file: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// reference partitions (publication id <TAB> stream id), and format sniffing

inline StreamPartition load_reference_partition(std::istream& in) {
  StreamPartition p;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
      throw ParseError("expected 'publication<TAB>stream'", line_no);
    std::string pub = line.substr(0, tab);
    std::string stream = line.substr(tab + 1);
    if (!p.assignment.emplace(pub, stream).second)
      throw ParseError("publication listed twice: " + pub, line_no);
  }
  return p;
}

inline void save_reference_partition(std::ostream& out, const StreamPartition& p) {
  for (const auto& [pub, stream] : p.assignment) out << pub << '\t' << stream << '\n';
}

/// Loads either a stream export (JSON) or a bare reference partition (TSV),
/// sniffing on the first non-space byte.
struct LoadedPartition {
  StreamPartition partition;
  std::optional<StreamFileData> stream_file;  // present when the source was a stream export
};

inline LoadedPartition load_partition_any(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  std::size_t i = text.find_first_not_of(" \t\r\n");
  LoadedPartition out;
  if (i != std::string::npos && text[i] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
    out.stream_file = streams_from_json(j);
    out.partition = out.stream_file->to_partition();
  } else {
    std::istringstream ss(text);
    out.partition = load_reference_partition(ss);
  }
  if (out.partition.empty())
    throw ValidationError("partition file holds no assignments: " + path.string());
  return out;
}

// ---------------------------------------------------------------------------
// comparison report and bipartite export

struct ComparisonSide {
  std::string source;
  std::size_t streams = 0;
  double entropy = 0.0;
};

inline json mean_std_to_json(const MeanStd& ms) {
  return json{{"mean", ms.mean}, {"stddev", ms.stddev}};
}

/// Full two-partition comparison on the shared universe. NMI fields are null
/// when the corresponding entropy vanishes (the measure is undefined there).
inline json comparison_report_json(const StreamPartition& x, const StreamPartition& y,
                                   const std::string& source_x, const std::string& source_y) {
  RestrictionReport restriction;
  auto [rx, ry] = restrict_to_shared(x, y, &restriction);

  double hx = entropy(rx);
  double hy = entropy(ry);
  double mi = mutual_information(rx, ry);
  BipartiteStreamGraph g = bipartite_graph(rx, ry);

  json j;
  j["schema"] = "bcstreams-compare-v1";
  j["x"] = json{{"source", source_x}, {"streams", rx.stream_sizes().size()}, {"entropy", hx}};
  j["y"] = json{{"source", source_y}, {"streams", ry.stream_sizes().size()}, {"entropy", hy}};
  j["restriction"] = json{{"shared", restriction.shared},
                          {"removed_x", restriction.removed_x},
                          {"removed_y", restriction.removed_y}};
  j["mi"] = mi;
  j["nmi_x"] = hx > 0.0 ? json(mi / hx) : json(nullptr);
  j["nmi_y"] = hy > 0.0 ? json(mi / hy) : json(nullptr);
  j["nmi"] = hx > 0.0 && hy > 0.0 ? json(mi / std::sqrt(hx * hy)) : json(nullptr);
  j["first_edge"] = json{{"x_to_y", mean_std_to_json(first_edge_avg(g, Direction::x_to_y))},
                         {"y_to_x", mean_std_to_json(first_edge_avg(g, Direction::y_to_x))}};
  j["sum80"] = json{{"x_to_y", mean_std_to_json(sum80(g, Direction::x_to_y))},
                    {"y_to_x", mean_std_to_json(sum80(g, Direction::y_to_x))}};
  return j;
}

inline json bipartite_to_json(const BipartiteStreamGraph& g,
                              const std::map<std::string, std::string>& labels_left,
                              const std::map<std::string, std::string>& labels_right) {
  auto side = [](const std::vector<BipartiteStreamGraph::Node>& nodes,
                 const std::map<std::string, std::string>& labels) {
    json arr = json::array();
    for (const auto& n : nodes) {
      json jn;
      jn["id"] = n.id;
      jn["size"] = n.size;
      auto it = labels.find(n.id);
      if (it != labels.end()) jn["label"] = it->second;
      arr.push_back(std::move(jn));
    }
    return arr;
  };
  json edges = json::array();
  for (const auto& [key, w] : g.edges) {
    json je;
    je["left"] = g.left[key.first].id;
    je["right"] = g.right[key.second].id;
    je["weight_lr"] = w.first;
    je["weight_rl"] = w.second;
    edges.push_back(std::move(je));
  }
  json j;
  j["schema"] = "bcstreams-bipartite-v1";
  j["left"] = side(g.left, labels_left);
  j["right"] = side(g.right, labels_right);
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace bcstreams
