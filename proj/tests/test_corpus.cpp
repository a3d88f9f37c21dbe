#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <set>
#include <thread>

#include "adt/corpus.hpp"
#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "adt/text.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace adt {
namespace {

using testing::entry_with_ad;
using testing::TempDir;

TEST(Stats, GermanRowRatio) {
  const auto stats = compute_stats(testing::german_row_fixture());
  // 20:07:25 = 72,445 s of AD over 144:24:52 = 519,892 s of video.
  const double expected_percent = 72445.0 / 519892.0 * 100.0;
  EXPECT_NEAR(stats.ratio * 100.0, expected_percent, 1e-9);
  EXPECT_NEAR(stats.ratio_percent_display(), 13.93, 1e-9);
  EXPECT_EQ(format_hms(stats.video_ms), "144:24:52");
  EXPECT_EQ(format_hms(stats.ad_ms), "20:07:25");
  EXPECT_EQ(stats.file_count, 5u);
}

TEST(Stats, CharacterCountUsesCodePoints) {
  const auto stats = compute_stats({entry_with_ad("x", 60000, 8000)});
  ASSERT_EQ(stats.file_count, 1u);
  // Two cues of "Ein Händler kommt." (18 code points, 19 bytes).
  EXPECT_EQ(stats.character_count, 36u);
  EXPECT_EQ(stats.ad_ms, 8000);
}

TEST(Stats, Errors) {
  EXPECT_THROW(compute_stats({}), InputError);
  EXPECT_THROW(compute_stats({entry_with_ad("short", 3000, 4000)}), InputError);
  EXPECT_THROW(compute_stats({entry_with_ad("zero", 0, 0)}), InputError);
}

TEST(Stats, PerLanguageTable) {
  auto entries = testing::german_row_fixture();
  auto en = entry_with_ad("en0", 600000, 60000);
  en.script.language = Language::kEn;
  entries.push_back(en);
  const auto rows = compute_stats_by_language(entries);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].label, "English");
  EXPECT_NEAR(rows[0].stats.ratio_percent_display(), 10.0, 1e-9);
  EXPECT_EQ(rows[1].label, "German");
  EXPECT_EQ(rows[2].label, "total");
  EXPECT_EQ(rows[2].stats.file_count, 6u);
  const auto table = stats_table(rows);
  EXPECT_NE(table.find("13.93%"), std::string::npos);
  EXPECT_NE(table.find("144:24:52"), std::string::npos);
  const auto j = nlohmann::json::parse(stats_json(rows));
  EXPECT_EQ(j["rows"][1]["ad_hours"], "20:07:25");
}

TEST(Hms, ParseAndFormat) {
  EXPECT_EQ(parse_hms("144:24:52"), 519892000);
  EXPECT_EQ(parse_hms("0:00:01.5"), 1500);
  EXPECT_EQ(format_hms(519892999), "144:24:52");
  EXPECT_THROW(parse_hms("1:60:00"), InputError);
  EXPECT_THROW(parse_hms("12:00"), InputError);
}

TEST(LoadCorpus, ReadsManifest) {
  TempDir dir;
  fs::write_file_atomic(dir / "a.srt", fs::read_file(testing::fixture("german_cues.srt")));
  fs::write_file_atomic(dir / "manifest.json",
                        R"({"entries":[{"srt":"a.srt","language":"de","video_duration":"0:05:00","media_ref":"a.mp4"}]})");
  const auto entries = load_corpus(dir / "manifest.json");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].script.segments.size(), 3u);
  EXPECT_EQ(entries[0].script.language, Language::kDe);
  EXPECT_EQ(entries[0].script.source_id, "a");
  EXPECT_DOUBLE_EQ(entries[0].video_duration_s, 300.0);

  fs::write_file_atomic(dir / "figure.srt", fs::read_file(testing::fixture("german_cues_arrow.srt")));
  fs::write_file_atomic(dir / "bad.json", R"({"entries":[{"srt":"figure.srt","language":"de","video_duration":300}]})");
  EXPECT_THROW(load_corpus(dir / "bad.json"), InputError);
}

// Tags output with the target and records call counts; optionally fails.
class FakeMt final : public MtProviderClient {
 public:
  std::string translate(const std::string& text, Language, Language target) override {
    const std::string key = text + "|" + std::string(language_code(target));
    int call = 0;
    {
      std::lock_guard lock(mutex_);
      call = ++calls_[key];
    }
    std::this_thread::sleep_for(std::chrono::microseconds(std::hash<std::string>{}(text) % 300));
    if (text.find("FAIL") != std::string::npos) throw Error("provider_error", "scripted failure");
    if (text.find("FLAKY") != std::string::npos && call == 1) throw Error("provider_error", "transient");
    return "[" + std::string(language_code(target)) + "] " + text;
  }
  std::string provider_id() const override { return "fake"; }

 private:
  std::mutex mutex_;
  std::map<std::string, int> calls_;
};

std::vector<CorpusEntry> synthetic_entries(std::size_t n) {
  CorpusEntry e;
  e.script.language = Language::kDe;
  e.script.source_id = "film";
  for (std::size_t i = 0; i < n; ++i) {
    e.script.segments.push_back(make_segment(static_cast<std::uint32_t>(i + 1), Timecode::from_millis(i * 5000),
                                             Timecode::from_millis(i * 5000 + 3000), "Satz " + std::to_string(i)));
  }
  return {e};
}

TEST(Synthetic, AlignedOutputWithEnglishPivot) {
  FakeMt mt;
  SyntheticOptions options;
  options.targets = {Language::kFr, Language::kIt};
  options.parallelism = 4;
  options.clock = [] { return std::string("2024-07-12T00:00:00Z"); };
  const auto corpus = generate_synthetic_pairs(synthetic_entries(60), mt, options);
  ASSERT_EQ(corpus.records.size(), 60u);
  EXPECT_EQ(corpus.targets, (std::vector<Language>{Language::kFr, Language::kIt, Language::kEn}));
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& r = corpus.records[i];
    EXPECT_EQ(r.segment_id, "film#" + std::to_string(i + 1));
    EXPECT_EQ(r.translations.at(Language::kFr).text, "[fr] Satz " + std::to_string(i));
    EXPECT_EQ(r.translations.at(Language::kEn).text, "[en] Satz " + std::to_string(i));
    EXPECT_TRUE(r.translations.at(Language::kEn).pivot);
    EXPECT_FALSE(r.translations.at(Language::kIt).pivot);
    EXPECT_EQ(r.translations.at(Language::kIt).provider, "fake");
    EXPECT_EQ(r.translations.at(Language::kIt).timestamp, "2024-07-12T00:00:00Z");
  }
  EXPECT_EQ(corpus.gap_count(), 0u);

  TempDir dir;
  write_parallel_corpus(corpus, dir.path());
  for (const char* name : {"de.txt", "de-fr.fr.txt", "de-it.it.txt", "de-en.pivot.txt", "pairs.jsonl"}) {
    const auto content = fs::read_file(dir / name);
    EXPECT_EQ(std::count(content.begin(), content.end(), '\n'), 60) << name;
  }
  EXPECT_EQ(read_sidecar_ids(dir / "pairs.jsonl").front(), "film#1");
}

TEST(Synthetic, RetriesThenRecordsGap) {
  FakeMt mt;
  auto entries = synthetic_entries(3);
  entries[0].script.segments[1] = make_segment(2, Timecode::from_millis(5000), Timecode::from_millis(8000), "FAIL");
  entries[0].script.segments[2] = make_segment(3, Timecode::from_millis(10000), Timecode::from_millis(12000), "FLAKY");
  SyntheticOptions options;
  options.targets = {Language::kFr};
  const auto corpus = generate_synthetic_pairs(entries, mt, options);
  const auto& failed = corpus.records[1].translations.at(Language::kFr);
  EXPECT_TRUE(failed.gap);
  EXPECT_EQ(failed.text, "@@GAP@@");
  EXPECT_EQ(failed.attempts, 3);
  EXPECT_FALSE(failed.error.empty());
  const auto& flaky = corpus.records[2].translations.at(Language::kFr);
  EXPECT_FALSE(flaky.gap);
  EXPECT_EQ(flaky.attempts, 2);
  EXPECT_EQ(corpus.gap_count(), 2u);  // fr and en for "FAIL"
}

TEST(Synthetic, RejectsMixedSourceLanguages) {
  FakeMt mt;
  auto entries = synthetic_entries(2);
  auto other = entries[0];
  other.script.language = Language::kFr;
  entries.push_back(other);
  EXPECT_THROW(generate_synthetic_pairs(entries, mt, {}), InputError);
}

std::vector<std::string> make_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("seg" + std::to_string(i));
  return ids;
}

void expect_partition(const SplitManifest& m, const std::vector<std::string>& ids) {
  std::multiset<std::string> all(m.train.begin(), m.train.end());
  all.insert(m.dev.begin(), m.dev.end());
  all.insert(m.test.begin(), m.test.end());
  EXPECT_EQ(all, std::multiset<std::string>(ids.begin(), ids.end()));
}

TEST(Split, DevTestCapShapes) {
  for (auto [n, train] : {std::pair<std::size_t, std::size_t>{21672, 21272}, {7499, 7099}}) {
    const auto ids = make_ids(n);
    const auto m = split_corpus(ids, 42);
    EXPECT_EQ(m.train.size(), train);
    EXPECT_EQ(m.dev.size(), 200u);
    EXPECT_EQ(m.test.size(), 200u);
    expect_partition(m, ids);
  }
}

TEST(Split, SeedDeterministic) {
  const auto ids = make_ids(1000);
  const auto a = split_corpus(ids, 7);
  EXPECT_EQ(split_corpus(ids, 7), a);
  EXPECT_NE(split_corpus(ids, 8).dev, a.dev);
  EXPECT_EQ(SplitManifest::from_json(a.to_json()), a);
}

TEST(Split, SplitsKeepInputOrder) {
  const auto ids = make_ids(500);
  const auto m = split_corpus(ids, 3, 50, 50);
  auto pos = [&](const std::string& id) { return std::stoi(id.substr(3)); };
  for (const auto* part : {&m.train, &m.dev, &m.test}) {
    for (std::size_t i = 1; i < part->size(); ++i) EXPECT_LT(pos((*part)[i - 1]), pos((*part)[i]));
  }
}

TEST(Split, Errors) {
  EXPECT_THROW(split_corpus(make_ids(399), 1), InputError);
  auto ids = make_ids(500);
  ids.push_back("seg3");
  EXPECT_THROW(split_corpus(ids, 1), InputError);
  EXPECT_EQ(split_corpus(make_ids(400), 1).train.size(), 0u);
}

}  // namespace
}  // namespace adt
