#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adt/language.hpp"
#include "adt/srt.hpp"

namespace adt {

struct CorpusEntry {
  AdScript script;
  double video_duration_s = 0.0;
  std::string media_ref;
};

struct CorpusStats {
  std::size_t file_count = 0;
  std::uint64_t character_count = 0;  // code points of clean_text
  std::int64_t video_ms = 0;
  std::int64_t ad_ms = 0;
  double ratio = 0.0;  // ad / video

  double video_hours() const { return static_cast<double>(video_ms) / 3.6e6; }
  double ad_hours() const { return static_cast<double>(ad_ms) / 3.6e6; }
  // Ratio in percent rounded to two decimals, for display only.
  double ratio_percent_display() const;
};

// Throws InputError for empty input, a segment past its video end, or zero
// total video duration (undefined ratio).
CorpusStats compute_stats(const std::vector<CorpusEntry>& entries);

// "H:MM:SS" with unbounded hours.
std::string format_hms(std::int64_t ms);
// Parses "H:MM:SS" or "H:MM:SS.mmm" into milliseconds.
std::int64_t parse_hms(std::string_view text);

struct StatsRow {
  std::string label;
  CorpusStats stats;
};

// One row per language present plus a computed total row.
std::vector<StatsRow> compute_stats_by_language(const std::vector<CorpusEntry>& entries);
std::string stats_table(const std::vector<StatsRow>& rows);
std::string stats_json(const std::vector<StatsRow>& rows);

// Manifest file: {"entries":[{"srt": path, "language": "de",
// "video_duration": seconds or "H:MM:SS", "media_ref": "..."}]}. SRT paths are
// resolved relative to the manifest's directory; scripts are parsed strictly.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& manifest_path);

// --- synthetic parallel data ---

class MtProviderClient {
 public:
  virtual ~MtProviderClient() = default;
  // Returns the translation; throws on provider failure.
  virtual std::string translate(const std::string& text, Language source, Language target) = 0;
  virtual std::string provider_id() const = 0;
};

struct SyntheticOptions {
  std::vector<Language> targets;
  int max_attempts = 3;
  int parallelism = 4;
  std::string gap_placeholder = "@@GAP@@";
  // Provenance clock; defaults to UTC ISO-8601 wall time.
  std::function<std::string()> clock;
};

struct TranslationCell {
  std::string text;  // gap_placeholder when gap
  bool gap = false;
  bool pivot = false;  // English mediating rendition
  int attempts = 0;
  std::string error;
  std::string provider;
  std::string timestamp;
};

struct ParallelRecord {
  std::string segment_id;  // "<source_id>#<cue index>"
  Timecode onset;
  Timecode offset;
  std::string source_text;
  std::map<Language, TranslationCell> translations;
};

struct ParallelCorpus {
  Language source = Language::kEn;
  std::vector<Language> targets;
  std::vector<ParallelRecord> records;

  std::size_t gap_count() const;
};

// Translates every segment of every entry into every target (English is always
// included and flagged as pivot). Failed segments are retried up to
// max_attempts, then kept as explicit gaps; no segment is ever dropped.
// All entries must share one source language.
ParallelCorpus generate_synthetic_pairs(const std::vector<CorpusEntry>& entries, MtProviderClient& mt,
                                        SyntheticOptions options);

// Writes "<src>.txt", "<src>-<tgt>.<tgt>.txt" per target (English as
// "<src>-en.pivot.txt") and the "pairs.jsonl" sidecar.
void write_parallel_corpus(const ParallelCorpus& corpus, const std::filesystem::path& dir);

// --- splits ---

struct SplitManifest {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
  std::size_t dev_cap = 200;
  std::size_t test_cap = 200;

  std::string to_json() const;
  static SplitManifest from_json(const std::string& json);
  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

// Seeded random split; dev and test take exactly their caps, train the rest.
// Each split keeps the input order of its ids. Throws InputError naming the
// shortfall when ids.size() < dev_cap + test_cap, or on duplicate ids.
SplitManifest split_corpus(const std::vector<std::string>& ids, std::uint64_t seed, std::size_t dev_cap = 200,
                           std::size_t test_cap = 200);

// Segment ids in sidecar order from a pairs.jsonl file.
std::vector<std::string> read_sidecar_ids(const std::filesystem::path& sidecar);

}  // namespace adt
