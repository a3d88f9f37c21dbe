#include "adt/srt.hpp"

#include <cstdio>

#include "adt/error.hpp"
#include "adt/text.hpp"

namespace adt {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::uint32_t to_uint(std::string_view s) {
  std::uint64_t v = 0;
  for (char c : s) {
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
    if (v > 0xFFFFFFFFull) throw InputError("number out of range: " + std::string(s));
  }
  return static_cast<std::uint32_t>(v);
}

bool only_stars(std::string_view tok) {
  return !tok.empty() && tok.find_first_not_of('*') == std::string_view::npos;
}

}  // namespace

Timecode Timecode::from_millis(std::int64_t total_ms) {
  if (total_ms < 0) throw InputError("negative timecode: " + std::to_string(total_ms) + " ms");
  Timecode t;
  t.millis = static_cast<std::uint32_t>(total_ms % 1000);
  total_ms /= 1000;
  t.seconds = static_cast<std::uint32_t>(total_ms % 60);
  total_ms /= 60;
  t.minutes = static_cast<std::uint32_t>(total_ms % 60);
  t.hours = static_cast<std::uint32_t>(total_ms / 60);
  return t;
}

Timecode Timecode::parse(std::string_view text, bool lenient) {
  const std::string_view s = text::trim(text);
  auto fail = [&](const char* why) -> Timecode {
    throw InputError("malformed timecode '" + std::string(text) + "': " + why);
  };
  const auto c1 = s.find(':');
  if (c1 == std::string_view::npos) return fail("missing ':'");
  const auto c2 = s.find(':', c1 + 1);
  if (c2 == std::string_view::npos) return fail("missing ':'");
  auto sep = s.find(',', c2 + 1);
  if (sep == std::string_view::npos && lenient) sep = s.find('.', c2 + 1);
  if (sep == std::string_view::npos) return fail("missing ',' millisecond separator");

  const auto hh = s.substr(0, c1);
  const auto mm = s.substr(c1 + 1, c2 - c1 - 1);
  const auto ss = s.substr(c2 + 1, sep - c2 - 1);
  const auto ms = s.substr(sep + 1);
  if (!all_digits(hh) || (!lenient && hh.size() < 2)) return fail("bad hours");
  if (!all_digits(mm) || mm.size() != 2) return fail("bad minutes");
  if (!all_digits(ss) || ss.size() != 2) return fail("bad seconds");
  if (!all_digits(ms) || ms.size() != 3) return fail("bad milliseconds");

  Timecode t{to_uint(hh), to_uint(mm), to_uint(ss), to_uint(ms)};
  if (t.minutes > 59) return fail("minutes > 59");
  if (t.seconds > 59) return fail("seconds > 59");
  return t;
}

std::int64_t Timecode::to_millis() const {
  return ((static_cast<std::int64_t>(hours) * 60 + minutes) * 60 + seconds) * 1000 + millis;
}

std::string Timecode::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02u:%02u:%02u,%03u", hours, minutes, seconds, millis);
  return buf;
}

StrippedText strip_markup(std::string_view raw) {
  StrippedText out;
  std::string clean;
  for (std::string_view line : text::split(raw, '\n')) {
    // '$' is removed wherever it occurs; tokens left empty vanish.
    std::vector<std::string> tokens;
    for (std::string_view tok : text::split_ws(line)) {
      if (tok.find('$') == std::string_view::npos) {
        tokens.emplace_back(tok);
        continue;
      }
      out.flags.pace_constrained = true;
      if (tok.find("$$") != std::string_view::npos) out.flags.double_pace_marker = true;
      std::string kept;
      for (char c : tok) {
        if (c != '$') kept.push_back(c);
      }
      if (!kept.empty()) tokens.push_back(std::move(kept));
    }

    std::size_t i = 0;
    // Leading scene markers and "UT:" prefixes, in any order.
    while (i < tokens.size()) {
      std::string& tok = tokens[i];
      if (only_stars(tok)) {
        out.flags.scene_change = true;
        ++i;
      } else if (text::starts_with(tok, "UT:")) {
        out.flags.spoken_subtitle = true;
        tok.erase(0, 3);
        if (tok.empty()) ++i;
      } else {
        break;
      }
    }
    for (; i < tokens.size(); ++i) {
      if (only_stars(tokens[i])) {
        out.flags.scene_change = true;
        continue;
      }
      if (!clean.empty()) clean.push_back(' ');
      clean += tokens[i];
    }
  }
  out.clean = std::move(clean);
  return out;
}

AdSegment make_segment(std::uint32_t index, Timecode onset, Timecode offset, std::string raw_text) {
  AdSegment seg;
  seg.index = index;
  seg.onset = onset;
  seg.offset = offset;
  auto stripped = strip_markup(raw_text);
  seg.raw_text = std::move(raw_text);
  seg.clean_text = std::move(stripped.clean);
  seg.flags = stripped.flags;
  return seg;
}

ParseResult parse_script_with_warnings(std::string_view bytes, const ParseOptions& options) {
  const bool lenient = options.mode == ParseMode::kLenient;
  if (text::starts_with(bytes, "\xEF\xBB\xBF")) bytes.remove_prefix(3);

  std::vector<std::string_view> lines = text::split(bytes, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].empty() && lines[i].back() == '\r') lines[i].remove_suffix(1);
    if (!text::is_valid_utf8(lines[i])) throw ParseError(i + 1, "invalid UTF-8");
  }

  ParseResult result;
  result.script.language = options.language;
  result.script.source_id = options.source_id;
  auto& segments = result.script.segments;

  auto is_blank = [](std::string_view l) { return text::trim(l).empty(); };
  auto problem = [&](std::size_t line, std::uint32_t index, const std::string& msg) {
    if (!lenient) throw ParseError(line, msg);
    result.warnings.push_back({line, index, msg});
  };

  std::size_t i = 0;
  while (i < lines.size()) {
    if (is_blank(lines[i])) {
      ++i;
      continue;
    }
    const std::size_t index_line = i + 1;
    const std::string_view index_text = text::trim(lines[i]);
    if (!all_digits(index_text)) throw ParseError(index_line, "expected cue index, got '" + std::string(index_text) + "'");
    std::uint32_t index = 0;
    try {
      index = to_uint(index_text);
    } catch (const InputError& e) {
      throw ParseError(index_line, e.what());
    }
    if (index == 0) throw ParseError(index_line, "cue index must be positive");

    ++i;
    if (i >= lines.size() || is_blank(lines[i])) throw ParseError(index_line + 1, "missing timing line");
    const std::size_t timing_line = i + 1;
    const std::string_view timing = text::trim(lines[i]);
    std::size_t arrow = timing.find("-->");
    std::size_t arrow_len = 3;
    if (arrow == std::string_view::npos) {
      arrow = timing.find("->");
      arrow_len = 2;
      if (arrow == std::string_view::npos) throw ParseError(timing_line, "missing '-->' in timing line");
      if (!lenient) throw ParseError(timing_line, "non-standard arrow '->' (strict mode requires '-->')");
    }
    Timecode onset;
    Timecode offset;
    try {
      onset = Timecode::parse(timing.substr(0, arrow), lenient);
      auto rhs = text::split_ws(timing.substr(arrow + arrow_len));
      if (rhs.empty()) throw InputError("missing end timecode");
      offset = Timecode::parse(rhs.front(), lenient);
    } catch (const InputError& e) {
      throw ParseError(timing_line, e.what());
    }

    ++i;
    std::string raw;
    bool first = true;
    while (i < lines.size() && !is_blank(lines[i])) {
      if (!first) raw.push_back('\n');
      raw += lines[i];
      first = false;
      ++i;
    }

    if (onset >= offset) {
      problem(timing_line, index, "onset " + onset.to_string() + " is not before offset " + offset.to_string());
    }
    if (!segments.empty()) {
      const AdSegment& prev = segments.back();
      if (index <= prev.index) {
        problem(index_line, index, "cue index " + std::to_string(index) + " does not increase (previous " +
                                       std::to_string(prev.index) + ")");
      }
      if (onset < prev.onset) {
        problem(timing_line, index, "cue starts before previous cue " + std::to_string(prev.index));
      } else if (onset < prev.offset) {
        problem(timing_line, index, "cue overlaps previous cue " + std::to_string(prev.index));
      }
    }
    segments.push_back(make_segment(index, onset, offset, std::move(raw)));
  }
  return result;
}

AdScript parse_script(std::string_view bytes, const ParseOptions& options) {
  return parse_script_with_warnings(bytes, options).script;
}

std::string serialize_script(const AdScript& script) {
  std::string out;
  for (const AdSegment& seg : script.segments) {
    out += std::to_string(seg.index);
    out += '\n';
    out += seg.onset.to_string();
    out += " --> ";
    out += seg.offset.to_string();
    out += '\n';
    out += seg.raw_text;
    out += "\n\n";
  }
  return out;
}

}  // namespace adt
