#include "adt/codec.hpp"

namespace adt {

using nlohmann::json;

void to_json(json& j, const Timecode& t) { j = t.to_string(); }
void from_json(const json& j, Timecode& t) { t = Timecode::parse(j.get<std::string>()); }

void to_json(json& j, const MarkupFlags& f) {
  j = {{"pace_constrained", f.pace_constrained},
       {"double_pace_marker", f.double_pace_marker},
       {"scene_change", f.scene_change},
       {"spoken_subtitle", f.spoken_subtitle}};
}

void from_json(const json& j, MarkupFlags& f) {
  f.pace_constrained = j.value("pace_constrained", false);
  f.double_pace_marker = j.value("double_pace_marker", false);
  f.scene_change = j.value("scene_change", false);
  f.spoken_subtitle = j.value("spoken_subtitle", false);
}

void to_json(json& j, const AdSegment& s) {
  j = {{"index", s.index},       {"onset", s.onset},           {"offset", s.offset},
       {"raw_text", s.raw_text}, {"clean_text", s.clean_text}, {"flags", s.flags}};
}

void from_json(const json& j, AdSegment& s) {
  s.index = j.at("index").get<std::uint32_t>();
  s.onset = j.at("onset").get<Timecode>();
  s.offset = j.at("offset").get<Timecode>();
  s.raw_text = j.at("raw_text").get<std::string>();
  s.clean_text = j.at("clean_text").get<std::string>();
  s.flags = j.at("flags").get<MarkupFlags>();
}

void to_json(json& j, const ParseWarning& w) {
  j = {{"line", w.line}, {"segment_index", w.segment_index}, {"message", w.message}};
}

void from_json(const json& j, ParseWarning& w) {
  w.line = j.at("line").get<std::size_t>();
  w.segment_index = j.at("segment_index").get<std::uint32_t>();
  w.message = j.at("message").get<std::string>();
}

void to_json(json& j, const SearchWindow& w) {
  j = {{"start_s", w.start_s}, {"end_s", w.end_s}, {"buffer_s", w.buffer_s}};
}

void from_json(const json& j, SearchWindow& w) {
  w.start_s = j.at("start_s").get<double>();
  w.end_s = j.at("end_s").get<double>();
  w.buffer_s = j.value("buffer_s", 10.0);
}

void to_json(json& j, const MomentCandidate& m) {
  j = {{"start_s", m.start_s}, {"end_s", m.end_s}, {"score", m.score}};
}

void from_json(const json& j, MomentCandidate& m) {
  m.start_s = j.at("start_s").get<double>();
  m.end_s = j.at("end_s").get<double>();
  m.score = j.at("score").get<double>();
}

void to_json(json& j, const SamplerConfig& c) {
  j = {{"mode", c.mode == SamplingMode::kFixedK ? "fixed_k" : "stride"},
       {"k", c.k},
       {"stride_frames", c.stride_frames},
       {"target_width", c.target_width},
       {"target_height", c.target_height}};
}

void from_json(const json& j, SamplerConfig& c) {
  const auto mode = j.value("mode", std::string("fixed_k"));
  if (mode == "fixed_k") {
    c.mode = SamplingMode::kFixedK;
  } else if (mode == "stride") {
    c.mode = SamplingMode::kStride;
  } else {
    throw InputError("unknown sampling mode '" + mode + "'");
  }
  c.k = j.value("k", 4);
  c.stride_frames = j.value("stride_frames", 50);
  c.target_width = j.value("target_width", 960);
  c.target_height = j.value("target_height", 540);
}

void to_json(json& j, const MediaInfo& m) { j = {{"fps", m.fps}, {"duration_s", m.duration_s}}; }

void from_json(const json& j, MediaInfo& m) {
  m.fps = j.at("fps").get<double>();
  m.duration_s = j.at("duration_s").get<double>();
}

void to_json(json& j, const TranslationResult& r) {
  j = {{"output_text", r.output_text},   {"input_tokens", r.input_tokens}, {"output_tokens", r.output_tokens},
       {"latency_ms", r.latency_ms},     {"retry_count", r.retry_count},   {"provider_meta", r.provider_meta}};
}

void from_json(const json& j, TranslationResult& r) {
  r.output_text = j.at("output_text").get<std::string>();
  r.input_tokens = j.value("input_tokens", std::int64_t{0});
  r.output_tokens = j.value("output_tokens", std::int64_t{0});
  r.latency_ms = j.value("latency_ms", std::int64_t{0});
  r.retry_count = j.value("retry_count", 0);
  r.provider_meta = j.value("provider_meta", std::map<std::string, std::string>{});
}

void to_json(json& j, const SqmRating& r) {
  j = {{"rater_id", r.rater_id},
       {"segment_id", r.segment_id},
       {"fluency", r.fluency},
       {"adequacy", r.adequacy},
       {"usefulness", r.usefulness}};
  if (r.modality) j["modality"] = std::string(modality_name(*r.modality));
}

void from_json(const json& j, SqmRating& r) {
  r.rater_id = j.at("rater_id").get<std::string>();
  r.segment_id = j.value("segment_id", std::string());
  r.fluency = j.at("fluency").get<int>();
  r.adequacy = j.at("adequacy").get<int>();
  r.usefulness = j.at("usefulness").get<int>();
  if (j.contains("modality") && j["modality"].is_string()) r.modality = parse_modality(j["modality"].get<std::string>());
}

}  // namespace adt
