#include "adt/prompt.hpp"

#include <set>

#include "adt/error.hpp"
#include "adt/fs.hpp"

namespace adt {

namespace {

const std::set<std::string> kPlaceholders = {"source_language", "target_language", "audio_description"};

constexpr std::string_view kTextOnly =
    "Translate the following audio description from {source_language} to {target_language}. "
    "Respond with the translation only. This is the audio description to translate:\n"
    "{audio_description}";

constexpr std::string_view kTextPlusFrames =
    "Translate the following audio description for the frames of this video from {source_language} to "
    "{target_language}. Respond with the translation only. If the audio description does not match the image, "
    "please ignore the image. Respond with a translation only. This is the audio description to translate:\n"
    "{audio_description}";

}  // namespace

std::string_view modality_name(Modality m) {
  return m == Modality::kTextOnly ? "text_only" : "text_plus_frames";
}

Modality parse_modality(std::string_view name) {
  if (name == "text_only" || name == "text") return Modality::kTextOnly;
  if (name == "text_plus_frames" || name == "frames") return Modality::kTextPlusFrames;
  throw InputError("unknown modality '" + std::string(name) + "' (expected text_only or text_plus_frames)");
}

PromptTemplate::PromptTemplate(Modality modality, std::string text) : modality_(modality), text_(std::move(text)) {
  std::set<std::string> seen;
  std::size_t pos = 0;
  while ((pos = text_.find('{', pos)) != std::string::npos) {
    const auto close = text_.find('}', pos);
    if (close == std::string::npos) throw ConfigError("prompt template has an unterminated '{'");
    const std::string name = text_.substr(pos + 1, close - pos - 1);
    if (!kPlaceholders.count(name)) throw ConfigError("prompt template has unknown placeholder {" + name + "}");
    seen.insert(name);
    pos = close + 1;
  }
  for (const auto& name : kPlaceholders) {
    if (!seen.count(name)) {
      throw ConfigError("prompt template for " + std::string(modality_name(modality)) + " is missing {" + name + "}");
    }
  }
}

std::string PromptTemplate::render(Language source, Language target, std::string_view audio_description) const {
  std::string out;
  out.reserve(text_.size() + audio_description.size());
  std::size_t pos = 0;
  while (pos < text_.size()) {
    const auto open = text_.find('{', pos);
    if (open == std::string::npos) {
      out.append(text_, pos, std::string::npos);
      break;
    }
    out.append(text_, pos, open - pos);
    const auto close = text_.find('}', open);
    const std::string_view name(text_.data() + open + 1, close - open - 1);
    if (name == "source_language") {
      out += language_name(source);
    } else if (name == "target_language") {
      out += language_name(target);
    } else {
      out += audio_description;
    }
    pos = close + 1;
  }
  return out;
}

PromptSet PromptSet::defaults() {
  return {PromptTemplate(Modality::kTextOnly, std::string(kTextOnly)),
          PromptTemplate(Modality::kTextPlusFrames, std::string(kTextPlusFrames))};
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet set = defaults();
  auto read = [&](const char* name, Modality m, PromptTemplate& slot) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path)) return;
    std::string text = fs::read_file(path);
    if (!text.empty() && text.back() == '\n') text.pop_back();
    slot = PromptTemplate(m, std::move(text));
  };
  read("text_only.txt", Modality::kTextOnly, set.text_only);
  read("text_plus_frames.txt", Modality::kTextPlusFrames, set.text_plus_frames);
  return set;
}

const PromptTemplate& PromptSet::for_modality(Modality m) const {
  return m == Modality::kTextOnly ? text_only : text_plus_frames;
}

void TranslationRequest::validate() const {
  if (source == target) throw InputError("source and target language are both " + std::string(language_code(source)));
  if (frames && frames->images.size() != frames->indices.size()) {
    throw InputError("frame set has " + std::to_string(frames->images.size()) + " images for " +
                     std::to_string(frames->indices.size()) + " indices");
  }
}

RenderedPrompt build_prompt(const TranslationRequest& request, const PromptSet& prompts) {
  request.validate();
  RenderedPrompt out;
  out.text = prompts.for_modality(request.modality()).render(request.source, request.target, request.segment.clean_text);
  if (request.frames) {
    for (const auto& bytes : request.frames->images) out.images.push_back({"image/jpeg", bytes});
  }
  return out;
}

}  // namespace adt
