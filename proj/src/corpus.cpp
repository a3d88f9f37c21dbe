#include "adt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "adt/rng.hpp"
#include "adt/text.hpp"
#include "json.hpp"

namespace adt {

using nlohmann::json;

namespace {

std::int64_t seconds_to_ms(double s) { return std::llround(s * 1000.0); }

std::string with_thousands(std::uint64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  const std::size_t lead = digits.size() % 3;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (i - lead) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string segment_id(const CorpusEntry& entry, std::size_t entry_pos, const AdSegment& seg) {
  const std::string base =
      entry.script.source_id.empty() ? "script" + std::to_string(entry_pos) : entry.script.source_id;
  return base + "#" + std::to_string(seg.index);
}

std::string one_line(std::string_view s) {
  std::string out(s);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

}  // namespace

double CorpusStats::ratio_percent_display() const { return std::round(ratio * 10000.0) / 100.0; }

CorpusStats compute_stats(const std::vector<CorpusEntry>& entries) {
  if (entries.empty()) throw InputError("compute_stats: no corpus entries");
  CorpusStats stats;
  stats.file_count = entries.size();
  for (const CorpusEntry& entry : entries) {
    const std::int64_t video_ms = seconds_to_ms(entry.video_duration_s);
    if (video_ms < 0) throw InputError("negative video duration for '" + entry.script.source_id + "'");
    stats.video_ms += video_ms;
    for (const AdSegment& seg : entry.script.segments) {
      if (seg.offset.to_millis() > video_ms) {
        throw InputError("segment " + std::to_string(seg.index) + " of '" + entry.script.source_id +
                         "' ends after the video (" + seg.offset.to_string() + ")");
      }
      stats.ad_ms += seg.duration_ms();
      stats.character_count += text::count_code_points(seg.clean_text);
    }
  }
  if (stats.video_ms == 0) throw InputError("undefined AD ratio: total video duration is zero");
  stats.ratio = static_cast<double>(stats.ad_ms) / static_cast<double>(stats.video_ms);
  return stats;
}

std::string format_hms(std::int64_t ms) {
  const std::int64_t total_s = ms / 1000;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%lld:%02lld:%02lld", static_cast<long long>(total_s / 3600),
                static_cast<long long>((total_s / 60) % 60), static_cast<long long>(total_s % 60));
  return buf;
}

std::int64_t parse_hms(std::string_view text) {
  const auto parts = text::split(text::trim(text), ':');
  if (parts.size() != 3) throw InputError("expected H:MM:SS, got '" + std::string(text) + "'");
  try {
    const long long h = std::stoll(std::string(parts[0]));
    const long long m = std::stoll(std::string(parts[1]));
    const double s = std::stod(std::string(parts[2]));
    if (h < 0 || m < 0 || m > 59 || s < 0 || s >= 60) throw InputError("out of range");
    return (h * 3600 + m * 60) * 1000 + std::llround(s * 1000.0);
  } catch (const std::exception&) {
    throw InputError("expected H:MM:SS, got '" + std::string(text) + "'");
  }
}

std::vector<StatsRow> compute_stats_by_language(const std::vector<CorpusEntry>& entries) {
  std::vector<StatsRow> rows;
  for (Language lang : kAllLanguages) {
    std::vector<CorpusEntry> subset;
    for (const auto& e : entries) {
      if (e.script.language == lang) subset.push_back(e);
    }
    if (!subset.empty()) rows.push_back({std::string(language_name(lang)), compute_stats(subset)});
  }
  rows.push_back({"total", compute_stats(entries)});
  return rows;
}

std::string stats_table(const std::vector<StatsRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %8s %14s %12s %12s %8s\n", "Language", "# Files", "# Characters",
                "Video Hours", "AD Hours", "Ratio");
  out << line;
  for (const auto& row : rows) {
    char ratio[32];
    std::snprintf(ratio, sizeof(ratio), "%.2f%%", row.stats.ratio_percent_display());
    std::snprintf(line, sizeof(line), "%-10s %8zu %14s %12s %12s %8s\n", row.label.c_str(), row.stats.file_count,
                  with_thousands(row.stats.character_count).c_str(), format_hms(row.stats.video_ms).c_str(),
                  format_hms(row.stats.ad_ms).c_str(), ratio);
    out << line;
  }
  return out.str();
}

std::string stats_json(const std::vector<StatsRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    arr.push_back({{"label", row.label},
                   {"files", row.stats.file_count},
                   {"characters", row.stats.character_count},
                   {"video_ms", row.stats.video_ms},
                   {"ad_ms", row.stats.ad_ms},
                   {"video_hours", format_hms(row.stats.video_ms)},
                   {"ad_hours", format_hms(row.stats.ad_ms)},
                   {"ratio", row.stats.ratio},
                   {"ratio_percent", row.stats.ratio_percent_display()}});
  }
  return json{{"rows", arr}}.dump(2);
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(fs::read_file(manifest_path));
  } catch (const json::exception& e) {
    throw InputError("invalid corpus manifest '" + manifest_path.string() + "': " + e.what());
  }
  if (!manifest.contains("entries") || !manifest["entries"].is_array()) {
    throw InputError("corpus manifest needs an \"entries\" array");
  }
  const auto base = manifest_path.parent_path();
  std::vector<CorpusEntry> entries;
  for (const auto& item : manifest["entries"]) {
    const std::string srt = item.at("srt").get<std::string>();
    ParseOptions opts;
    opts.mode = ParseMode::kStrict;
    opts.language = language_from_code(item.at("language").get<std::string>());
    opts.source_id = item.value("id", std::filesystem::path(srt).stem().string());
    CorpusEntry entry;
    const auto path = std::filesystem::path(srt).is_absolute() ? std::filesystem::path(srt) : base / srt;
    try {
      entry.script = parse_script(fs::read_file(path), opts);
    } catch (const ParseError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    const auto& dur = item.at("video_duration");
    entry.video_duration_s =
        dur.is_string() ? static_cast<double>(parse_hms(dur.get<std::string>())) / 1000.0 : dur.get<double>();
    entry.media_ref = item.value("media_ref", std::string());
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::size_t ParallelCorpus::gap_count() const {
  std::size_t n = 0;
  for (const auto& r : records) {
    for (const auto& [lang, cell] : r.translations) n += cell.gap ? 1 : 0;
  }
  return n;
}

ParallelCorpus generate_synthetic_pairs(const std::vector<CorpusEntry>& entries, MtProviderClient& mt,
                                        SyntheticOptions options) {
  ParallelCorpus corpus;
  if (entries.empty()) return corpus;
  corpus.source = entries.front().script.language;
  for (const auto& e : entries) {
    if (e.script.language != corpus.source) throw InputError("synthetic generation needs one source language per run");
  }
  if (options.max_attempts < 1) throw InputError("max_attempts must be >= 1");
  if (!options.clock) options.clock = fs::utc_timestamp;

  for (Language t : options.targets) {
    if (t != corpus.source && std::find(corpus.targets.begin(), corpus.targets.end(), t) == corpus.targets.end()) {
      corpus.targets.push_back(t);
    }
  }
  if (corpus.source != Language::kEn &&
      std::find(corpus.targets.begin(), corpus.targets.end(), Language::kEn) == corpus.targets.end()) {
    corpus.targets.push_back(Language::kEn);
  }

  for (std::size_t ei = 0; ei < entries.size(); ++ei) {
    for (const AdSegment& seg : entries[ei].script.segments) {
      ParallelRecord rec;
      rec.segment_id = segment_id(entries[ei], ei, seg);
      rec.onset = seg.onset;
      rec.offset = seg.offset;
      rec.source_text = seg.clean_text;
      for (Language t : corpus.targets) rec.translations[t] = {};
      corpus.records.push_back(std::move(rec));
    }
  }

  const std::size_t n_tasks = corpus.records.size() * corpus.targets.size();
  std::atomic<std::size_t> next{0};
  std::mutex clock_mutex;
  const std::string provider = mt.provider_id();

  auto worker = [&] {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      ParallelRecord& rec = corpus.records[task / corpus.targets.size()];
      const Language target = corpus.targets[task % corpus.targets.size()];
      TranslationCell& cell = rec.translations.at(target);
      cell.provider = provider;
      cell.pivot = target == Language::kEn;
      for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        cell.attempts = attempt;
        try {
          std::string out(text::trim(mt.translate(rec.source_text, corpus.source, target)));
          if (out.empty()) {
            cell.error = "empty translation";
            continue;
          }
          cell.text = one_line(out);
          cell.error.clear();
          break;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      if (cell.text.empty()) {
        cell.gap = true;
        cell.text = options.gap_placeholder;
      }
      std::lock_guard lock(clock_mutex);
      cell.timestamp = options.clock();
    }
  };

  const int threads = std::max(1, std::min<int>(options.parallelism, static_cast<int>(n_tasks)));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return corpus;
}

void write_parallel_corpus(const ParallelCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string src(language_code(corpus.source));
  std::string source_lines;
  for (const auto& r : corpus.records) source_lines += one_line(r.source_text) + "\n";
  fs::write_file_atomic(dir / (src + ".txt"), source_lines);

  for (Language t : corpus.targets) {
    const std::string tgt(language_code(t));
    std::string lines;
    for (const auto& r : corpus.records) lines += r.translations.at(t).text + "\n";
    const std::string name = t == Language::kEn ? src + "-en.pivot.txt" : src + "-" + tgt + "." + tgt + ".txt";
    fs::write_file_atomic(dir / name, lines);
  }

  std::string sidecar;
  for (const auto& r : corpus.records) {
    json tr = json::object();
    for (const auto& [lang, cell] : r.translations) {
      tr[std::string(language_code(lang))] = {{"text", cell.text},         {"gap", cell.gap},
                                              {"pivot", cell.pivot},       {"attempts", cell.attempts},
                                              {"error", cell.error},       {"provider", cell.provider},
                                              {"timestamp", cell.timestamp}};
    }
    json line = {{"id", r.segment_id},
                 {"source_lang", src},
                 {"onset", r.onset.to_string()},
                 {"offset", r.offset.to_string()},
                 {"source", r.source_text},
                 {"translations", tr}};
    sidecar += line.dump() + "\n";
  }
  fs::write_file_atomic(dir / "pairs.jsonl", sidecar);
}

std::string SplitManifest::to_json() const {
  json j = {{"seed", seed}, {"dev_cap", dev_cap}, {"test_cap", test_cap},
            {"rng", "mt19937_64+rejection+fisher-yates"},
            {"train", train}, {"dev", dev}, {"test", test}};
  return j.dump(2) + "\n";
}

SplitManifest SplitManifest::from_json(const std::string& text) {
  const json j = json::parse(text);
  SplitManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.dev_cap = j.at("dev_cap").get<std::size_t>();
  m.test_cap = j.at("test_cap").get<std::size_t>();
  m.train = j.at("train").get<std::vector<std::string>>();
  m.dev = j.at("dev").get<std::vector<std::string>>();
  m.test = j.at("test").get<std::vector<std::string>>();
  return m;
}

SplitManifest split_corpus(const std::vector<std::string>& ids, std::uint64_t seed, std::size_t dev_cap,
                           std::size_t test_cap) {
  if (ids.size() < dev_cap + test_cap) {
    throw InputError("split_corpus: " + std::to_string(ids.size()) + " pairs, need at least " +
                     std::to_string(dev_cap + test_cap) + " (short by " +
                     std::to_string(dev_cap + test_cap - ids.size()) + ")");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw InputError("split_corpus: duplicate id '" + id + "'");
  }

  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  PortableRng rng(seed);
  rng.shuffle(order);

  auto take = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> pos(order.begin() + static_cast<std::ptrdiff_t>(from),
                                 order.begin() + static_cast<std::ptrdiff_t>(to));
    std::sort(pos.begin(), pos.end());
    std::vector<std::string> out;
    out.reserve(pos.size());
    for (auto p : pos) out.push_back(ids[p]);
    return out;
  };

  SplitManifest m;
  m.seed = seed;
  m.dev_cap = dev_cap;
  m.test_cap = test_cap;
  m.dev = take(0, dev_cap);
  m.test = take(dev_cap, dev_cap + test_cap);
  m.train = take(dev_cap + test_cap, ids.size());
  return m;
}

std::vector<std::string> read_sidecar_ids(const std::filesystem::path& sidecar) {
  std::vector<std::string> ids;
  std::istringstream in(fs::read_file(sidecar));
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    ids.push_back(json::parse(line).at("id").get<std::string>());
  }
  return ids;
}

}  // namespace adt
