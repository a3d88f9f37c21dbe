#pragma once

// Random inputs shared by property tests and the acceptance suite.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adt/corpus.hpp"
#include "adt/srt.hpp"

namespace adt::testing {

inline std::string random_word(std::mt19937_64& rng) {
  static const std::vector<std::string> kPieces = {"a",  "der", "Händler", "ça", "più", "$",  "$$", "*",  "UT:", "x",
                                                   "->", "1",   "42",      ",",  ".",   "é",  "ß",  "--", "Z",   "é!"};
  std::uniform_int_distribution<std::size_t> pick(0, kPieces.size() - 1);
  std::string w = kPieces[pick(rng)];
  if (rng() % 3 == 0) w += kPieces[pick(rng)];
  return w;
}

// Cue bodies never contain blank or whitespace-only lines, which SRT cannot
// represent; an empty body is allowed.
inline std::string random_body(std::mt19937_64& rng) {
  const int lines = static_cast<int>(rng() % 4);
  std::string body;
  for (int l = 0; l < lines; ++l) {
    if (l) body += '\n';
    const int words = 1 + static_cast<int>(rng() % 6);
    for (int w = 0; w < words; ++w) {
      if (w) body += (rng() % 5 == 0) ? "  " : " ";
      body += random_word(rng);
    }
  }
  return body;
}

inline AdScript random_script(std::mt19937_64& rng) {
  AdScript script;
  const int n = static_cast<int>(rng() % 12);
  std::uint32_t index = 1 + static_cast<std::uint32_t>(rng() % 5);
  std::int64_t t = static_cast<std::int64_t>(rng() % 5000);
  for (int i = 0; i < n; ++i) {
    const std::int64_t onset = t;
    const std::int64_t offset = onset + 1 + static_cast<std::int64_t>(rng() % 20000);
    // Occasionally a cue past 100 hours to exercise wide hour fields.
    const std::int64_t shift = (rng() % 50 == 0) ? std::int64_t{360000000} : 0;
    script.segments.push_back(make_segment(index, Timecode::from_millis(onset + shift),
                                           Timecode::from_millis(offset + shift), random_body(rng)));
    index += 1 + static_cast<std::uint32_t>(rng() % 3);
    t = offset + static_cast<std::int64_t>(rng() % 3000);
    if (shift) break;
  }
  return script;
}

// Entry whose cues are 4 s long with 1 s gaps (the last one shorter) and add up
// to ad_ms of description.
inline CorpusEntry entry_with_ad(const std::string& id, std::int64_t video_ms, std::int64_t ad_ms) {
  CorpusEntry e;
  e.script.language = Language::kDe;
  e.script.source_id = id;
  e.video_duration_s = static_cast<double>(video_ms) / 1000.0;
  std::int64_t t = 0;
  std::uint32_t index = 1;
  while (ad_ms > 0) {
    const std::int64_t len = std::min<std::int64_t>(4000, ad_ms);
    e.script.segments.push_back(
        make_segment(index++, Timecode::from_millis(t), Timecode::from_millis(t + len), "Ein Händler kommt."));
    ad_ms -= len;
    t += len + 1000;
  }
  return e;
}

// Five videos totalling 144:24:52 with 20:07:25 of description.
inline std::vector<CorpusEntry> german_row_fixture() {
  const std::int64_t video_s[] = {100000, 100000, 100000, 100000, 119892};
  std::vector<CorpusEntry> entries;
  for (int i = 0; i < 5; ++i) entries.push_back(entry_with_ad("de" + std::to_string(i), video_s[i] * 1000, 14489000));
  return entries;
}

}  // namespace adt::testing
