#pragma once

// JSON encodings of domain types, shared by the store, the HTTP API and the
// CLI.

#include "adt/frames.hpp"
#include "adt/grounding.hpp"
#include "adt/human_eval.hpp"
#include "adt/srt.hpp"
#include "adt/translator.hpp"
#include "json.hpp"

namespace adt {

void to_json(nlohmann::json& j, const Timecode& t);
void from_json(const nlohmann::json& j, Timecode& t);
void to_json(nlohmann::json& j, const MarkupFlags& f);
void from_json(const nlohmann::json& j, MarkupFlags& f);
void to_json(nlohmann::json& j, const AdSegment& s);
void from_json(const nlohmann::json& j, AdSegment& s);
void to_json(nlohmann::json& j, const ParseWarning& w);
void from_json(const nlohmann::json& j, ParseWarning& w);
void to_json(nlohmann::json& j, const SearchWindow& w);
void from_json(const nlohmann::json& j, SearchWindow& w);
void to_json(nlohmann::json& j, const MomentCandidate& m);
void from_json(const nlohmann::json& j, MomentCandidate& m);
void to_json(nlohmann::json& j, const SamplerConfig& c);
void from_json(const nlohmann::json& j, SamplerConfig& c);
void to_json(nlohmann::json& j, const MediaInfo& m);
void from_json(const nlohmann::json& j, MediaInfo& m);
void to_json(nlohmann::json& j, const TranslationResult& r);
void from_json(const nlohmann::json& j, TranslationResult& r);
void to_json(nlohmann::json& j, const SqmRating& r);
void from_json(const nlohmann::json& j, SqmRating& r);

}  // namespace adt
