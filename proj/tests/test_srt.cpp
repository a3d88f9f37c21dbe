#include <gtest/gtest.h>

#include <random>

#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "adt/srt.hpp"
#include "generators.hpp"
#include "test_support.hpp"

namespace adt {
namespace {

using testing::fixture;

ParseOptions lenient() {
  ParseOptions o;
  o.mode = ParseMode::kLenient;
  o.language = Language::kDe;
  return o;
}

TEST(Timecode, ParsesAndFormats) {
  const auto t = Timecode::parse("00:01:13,240");
  EXPECT_EQ(t.to_millis(), 73240);
  EXPECT_EQ(t.to_string(), "00:01:13,240");
  EXPECT_EQ(Timecode::from_millis(73240), t);
  EXPECT_EQ(Timecode::from_millis(100LL * 3600 * 1000).to_string(), "100:00:00,000");
}

TEST(Timecode, LenientAcceptsDotSeparator) {
  EXPECT_THROW(Timecode::parse("00:01:13.240"), InputError);
  EXPECT_EQ(Timecode::parse("00:01:13.240", true).to_millis(), 73240);
}

TEST(Timecode, RejectsMalformed) {
  for (const char* bad : {"00:60:00,000", "00:00:60,000", "00:00:00,00", "0:00:00,000", "aa:00:00,000", "00:00,000"}) {
    EXPECT_THROW(Timecode::parse(bad), InputError) << bad;
  }
  EXPECT_THROW(Timecode::from_millis(-1), InputError);
}

TEST(Markup, GermanSampleCues) {
  auto s = strip_markup("$ Eine wuchtige Rolls Roice Luxus-Limousine. * Ein Händler kommt:");
  EXPECT_EQ(s.clean, "Eine wuchtige Rolls Roice Luxus-Limousine. Ein Händler kommt:");
  EXPECT_TRUE(s.flags.pace_constrained);
  EXPECT_FALSE(s.flags.double_pace_marker);
  EXPECT_TRUE(s.flags.scene_change);
  EXPECT_FALSE(s.flags.spoken_subtitle);

  s = strip_markup("Chris nickt lächelnd.\n$$ Der Händler öffnet die Autotüren.");
  EXPECT_EQ(s.clean, "Chris nickt lächelnd. Der Händler öffnet die Autotüren.");
  EXPECT_TRUE(s.flags.pace_constrained);
  EXPECT_TRUE(s.flags.double_pace_marker);
  EXPECT_FALSE(s.flags.scene_change);

  s = strip_markup("UT: Toll. Es gibt nicht viele Autos.");
  EXPECT_EQ(s.clean, "Toll. Es gibt nicht viele Autos.");
  EXPECT_TRUE(s.flags.spoken_subtitle);
  EXPECT_FALSE(s.flags.pace_constrained);
}

TEST(Markup, CollapsesWhitespaceAndIsIdempotent) {
  const auto s = strip_markup("  *  $UT:  Hallo    Welt  ");
  EXPECT_EQ(s.clean, "Hallo Welt");
  EXPECT_TRUE(s.flags.scene_change);
  EXPECT_TRUE(s.flags.pace_constrained);
  EXPECT_TRUE(s.flags.spoken_subtitle);
  EXPECT_EQ(strip_markup(s.clean).clean, s.clean);
  EXPECT_EQ(strip_markup(s.clean).flags, MarkupFlags{});
}

TEST(Markup, PlainTextUnchanged) {
  const auto s = strip_markup("A woman walks along a beach.");
  EXPECT_EQ(s.clean, "A woman walks along a beach.");
  EXPECT_EQ(s.flags, MarkupFlags{});
}

TEST(Parse, SingleArrowNeedsLenientMode) {
  const auto bytes = fs::read_file(fixture("german_cues_arrow.srt"));
  try {
    parse_script(bytes);
    FAIL() << "strict mode accepted '->'";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  const auto script = parse_script(bytes, lenient());
  ASSERT_EQ(script.segments.size(), 3u);
  EXPECT_EQ(script.segments[0].index, 7u);
  EXPECT_EQ(script.segments[0].onset.to_millis(), 73240);
  EXPECT_EQ(script.segments[0].offset.to_millis(), 76720);
  EXPECT_EQ(script.segments[1].raw_text, "Chris nickt lächelnd.\n$$ Der Händler öffnet die Autotüren.");
  EXPECT_TRUE(script.segments[2].flags.spoken_subtitle);
  EXPECT_EQ(script.language, Language::kDe);
}

TEST(Parse, GoldenFilesAreByteIdentical) {
  for (const char* name : {"german_cues.srt", "three_cues.srt"}) {
    const auto bytes = fs::read_file(fixture(name));
    EXPECT_EQ(serialize_script(parse_script(bytes)), bytes) << name;
  }
  // The figure's arrows normalize to the golden file.
  EXPECT_EQ(serialize_script(parse_script(fs::read_file(fixture("german_cues_arrow.srt")), lenient())),
            fs::read_file(fixture("german_cues.srt")));
}

TEST(Parse, CrlfAndBomNormalize) {
  const auto golden = fs::read_file(fixture("german_cues.srt"));
  std::string crlf = "\xEF\xBB\xBF";
  for (char c : golden) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  EXPECT_EQ(serialize_script(parse_script(crlf)), golden);
}

TEST(Parse, ErrorsCarryLineNumbers) {
  try {
    parse_script("1\n00:00:01,000 --> 00:00:02,000\nok\n\nx\n00:00:03,000 --> 00:00:04,000\nbad\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
  try {
    parse_script("1\n00:00:01,000 --> 00:0:02,000\nok\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_script("1\n"), ParseError);
  EXPECT_THROW(parse_script("1\n00:00:01,000 --> 00:00:02,000\n\xC3\x28\n"), ParseError);
}

TEST(Parse, OverlapIsErrorStrictWarningLenient) {
  const std::string bytes =
      "1\n00:00:01,000 --> 00:00:05,000\nfirst\n\n2\n00:00:04,000 --> 00:00:06,000\nsecond\n";
  EXPECT_THROW(parse_script(bytes), ParseError);
  const auto r = parse_script_with_warnings(bytes, lenient());
  ASSERT_EQ(r.script.segments.size(), 2u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].segment_index, 2u);
  EXPECT_EQ(r.warnings[0].line, 6u);
}

TEST(Parse, EmptyInputAndEmptyBody) {
  EXPECT_TRUE(parse_script("").segments.empty());
  const auto s = parse_script("1\n00:00:01,000 --> 00:00:02,000\n\n2\n00:00:03,000 --> 00:00:04,000\nx\n");
  ASSERT_EQ(s.segments.size(), 2u);
  EXPECT_EQ(s.segments[0].raw_text, "");
  EXPECT_EQ(parse_script(serialize_script(s)), s);
}

TEST(Parse, RandomRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const AdScript s = testing::random_script(rng);
    const auto text = serialize_script(s);
    ASSERT_EQ(parse_script(text), s) << text;
    ASSERT_EQ(serialize_script(parse_script(text)), text);
  }
}

}  // namespace
}  // namespace adt
