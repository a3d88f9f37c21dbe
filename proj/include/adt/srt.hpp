#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adt/language.hpp"

namespace adt {

// SRT cue time, canonical form "HH:MM:SS,mmm".
struct Timecode {
  std::uint32_t hours = 0;
  std::uint32_t minutes = 0;
  std::uint32_t seconds = 0;
  std::uint32_t millis = 0;

  static Timecode from_millis(std::int64_t total_ms);
  // Accepts "H+:MM:SS,mmm"; `lenient` also allows '.' as millisecond separator.
  // Throws InputError on malformed text.
  static Timecode parse(std::string_view text, bool lenient = false);

  std::int64_t to_millis() const;
  double to_seconds() const { return static_cast<double>(to_millis()) / 1000.0; }
  std::string to_string() const;

  friend auto operator<=>(const Timecode&, const Timecode&) = default;
};

// Production markers carried by AD cues.
struct MarkupFlags {
  bool pace_constrained = false;    // '$'
  bool double_pace_marker = false;  // '$$', implies pace_constrained
  bool scene_change = false;        // '*'
  bool spoken_subtitle = false;     // "UT:" line prefix

  friend bool operator==(const MarkupFlags&, const MarkupFlags&) = default;
};

struct StrippedText {
  std::string clean;
  MarkupFlags flags;
};

// Removes AD markers and collapses whitespace (lines are joined with single
// spaces). Idempotent on its `clean` output.
StrippedText strip_markup(std::string_view raw);

struct AdSegment {
  std::uint32_t index = 0;
  Timecode onset;
  Timecode offset;
  std::string raw_text;  // cue lines joined with '\n'
  std::string clean_text;
  MarkupFlags flags;

  std::int64_t duration_ms() const { return offset.to_millis() - onset.to_millis(); }

  friend bool operator==(const AdSegment&, const AdSegment&) = default;
};

// Builds a segment from raw text, deriving clean_text and flags.
AdSegment make_segment(std::uint32_t index, Timecode onset, Timecode offset, std::string raw_text);

struct AdScript {
  std::vector<AdSegment> segments;
  Language language = Language::kEn;
  std::string source_id;

  friend bool operator==(const AdScript&, const AdScript&) = default;
};

enum class ParseMode {
  kStrict,   // "-->" only; ordering and overlap problems are errors
  kLenient,  // "->" and "-->"; ordering and overlap problems become warnings
};

struct ParseWarning {
  std::size_t line = 0;
  std::uint32_t segment_index = 0;
  std::string message;
};

struct ParseOptions {
  ParseMode mode = ParseMode::kStrict;
  Language language = Language::kEn;
  std::string source_id;
};

struct ParseResult {
  AdScript script;
  std::vector<ParseWarning> warnings;
};

// Parses UTF-8 SRT bytes (optional BOM, LF or CRLF). Throws ParseError with
// the offending line number.
ParseResult parse_script_with_warnings(std::string_view bytes, const ParseOptions& options);
AdScript parse_script(std::string_view bytes, const ParseOptions& options = {});

// Canonical SRT: "-->" arrows, LF endings, each cue followed by a blank line.
std::string serialize_script(const AdScript& script);

}  // namespace adt
