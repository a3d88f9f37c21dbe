#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adt/frames.hpp"
#include "adt/language.hpp"
#include "adt/srt.hpp"

namespace adt {

enum class Modality { kTextOnly, kTextPlusFrames };

std::string_view modality_name(Modality m);  // "text_only" | "text_plus_frames"
Modality parse_modality(std::string_view name);  // also accepts "text", "frames"

// A translation prompt with the placeholders {source_language},
// {target_language} and {audio_description}. Construction validates that all
// three are present and nothing else is, so bad templates fail at load time.
class PromptTemplate {
 public:
  PromptTemplate(Modality modality, std::string text);

  Modality modality() const { return modality_; }
  const std::string& text() const { return text_; }
  std::string render(Language source, Language target, std::string_view audio_description) const;

 private:
  Modality modality_;
  std::string text_;
};

struct PromptSet {
  PromptTemplate text_only;
  PromptTemplate text_plus_frames;

  static PromptSet defaults();
  // Reads "text_only.txt" and "text_plus_frames.txt" from `dir`; a missing
  // file keeps the default. A single trailing newline is dropped.
  static PromptSet load(const std::filesystem::path& dir);
  const PromptTemplate& for_modality(Modality m) const;
};

struct ImageAttachment {
  std::string mime = "image/jpeg";
  std::string bytes;
};

struct TranslationRequest {
  Language source = Language::kEn;
  Language target = Language::kDe;
  AdSegment segment;
  std::optional<FrameSet> frames;  // present iff text + frames
  std::string model_id = "gpt-4o";
  double temperature = 0.0;

  Modality modality() const { return frames ? Modality::kTextPlusFrames : Modality::kTextOnly; }
  // Throws InputError when source == target.
  void validate() const;
};

struct RenderedPrompt {
  std::string text;
  std::vector<ImageAttachment> images;  // sampling order
};

// Fills the modality's template with English language names and the segment's
// clean text; frames are attached in index order.
RenderedPrompt build_prompt(const TranslationRequest& request, const PromptSet& prompts = PromptSet::defaults());

}  // namespace adt
