#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bcstreams/errors.hpp"

namespace bcstreams {

/// One time-stamped document. `refs` is kept sorted and duplicate-free so that
/// reference overlaps can be computed by merge-style intersection.
struct Publication {
  std::string id;
  int year = 0;
  std::vector<std::string> refs;
  std::string label;  // optional display token (e.g. an author name); empty = none
};

/// An immutable set of publications with a derived year range.
class Corpus {
 public:
  Corpus() = default;

  explicit Corpus(std::vector<Publication> pubs) : pubs_(std::move(pubs)) {
    index_.reserve(pubs_.size());
    for (std::uint32_t i = 0; i < pubs_.size(); ++i) {
      Publication& p = pubs_[i];
      if (p.id.empty()) throw ValidationError("publication with empty id");
      std::sort(p.refs.begin(), p.refs.end());
      p.refs.erase(std::unique(p.refs.begin(), p.refs.end()), p.refs.end());
      if (!index_.emplace(p.id, i).second)
        throw ValidationError("duplicate publication id: " + p.id);
      if (i == 0) {
        min_year_ = max_year_ = p.year;
      } else {
        min_year_ = std::min(min_year_, p.year);
        max_year_ = std::max(max_year_, p.year);
      }
    }
  }

  const std::vector<Publication>& publications() const { return pubs_; }
  std::size_t size() const { return pubs_.size(); }
  bool empty() const { return pubs_.empty(); }

  /// (min year, max year), inclusive. Only valid for a non-empty corpus.
  std::pair<int, int> period() const {
    if (empty()) throw ValidationError("period of an empty corpus");
    return {min_year_, max_year_};
  }

  std::optional<std::uint32_t> index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const Publication& at(std::uint32_t idx) const { return pubs_[idx]; }

 private:
  std::vector<Publication> pubs_;
  std::unordered_map<std::string, std::uint32_t> index_;
  int min_year_ = 0;
  int max_year_ = 0;
};

/// Half-open year interval [start, end). The trailing window of a slicing may be
/// shorter than the requested width; it is kept and marked `partial`.
struct TimeWindow {
  int start = 0;
  int end = 0;
  int index = 0;
  bool partial = false;

  bool contains(int year) const { return year >= start && year < end; }
  std::string name() const { return std::to_string(start) + "-" + std::to_string(end); }
};

/// A window together with the corpus positions of the publications it holds.
struct WindowSlice {
  TimeWindow window;
  std::vector<std::uint32_t> pubs;
};

/// Cuts the corpus period into contiguous windows of `delta_t` years anchored at
/// the earliest publication year. Every publication lands in exactly one window.
/// An empty corpus yields an empty slicing.
inline std::vector<WindowSlice> slice_windows(const Corpus& corpus, int delta_t) {
  if (delta_t < 1) throw ValidationError("window width must be at least 1 year");
  std::vector<WindowSlice> out;
  if (corpus.empty()) return out;

  auto [min_year, max_year] = corpus.period();
  int span = max_year - min_year + 1;
  int count = (span + delta_t - 1) / delta_t;
  out.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) {
    TimeWindow tw;
    tw.start = min_year + w * delta_t;
    tw.end = tw.start + delta_t;
    tw.index = w;
    tw.partial = tw.end > max_year + 1;
    out.push_back({tw, {}});
  }
  for (std::uint32_t i = 0; i < corpus.size(); ++i) {
    int w = (corpus.at(i).year - min_year) / delta_t;
    out[static_cast<std::size_t>(w)].pubs.push_back(i);
  }
  return out;
}

}  // namespace bcstreams
