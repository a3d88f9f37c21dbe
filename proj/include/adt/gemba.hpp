#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adt/language.hpp"
#include "adt/provider.hpp"

namespace adt {

enum class Severity { kNone, kMinor, kMajor, kCritical };

// 0, 1, 5, 10.
int severity_weight(Severity s);
std::string_view severity_name(Severity s);

struct ErrorSpan {
  Severity severity = Severity::kMinor;
  std::string category;
  std::string text;
};

struct QeAnnotation {
  std::vector<ErrorSpan> spans;
  int weight = 0;  // sum of span severity weights
  bool parse_failure = false;
  std::string raw_reply;
};

// Parses an MQM-style annotation reply. Accepts the block form
//   Critical:\nno-error\nMajor:\naccuracy/mistranslation - "x"\nMinor:\n...
// and the inline form "minor: word order; major: mistranslation", plus a bare
// "no-error". Returns nullopt when nothing recognizable is found.
std::optional<QeAnnotation> parse_mqm_reply(std::string_view reply);

struct GembaExemplar {
  Language source = Language::kEn;
  Language target = Language::kDe;
  std::string source_text;
  std::string translation;
  std::string annotation;  // reply in block form
};

// Few-shot exemplars, shipped as editable JSON ({"exemplars": [...]}).
struct GembaExemplars {
  std::vector<GembaExemplar> items;

  static GembaExemplars load(const std::filesystem::path& path);
  static GembaExemplars from_json(const std::string& text);
  static GembaExemplars defaults();
};

std::string build_gemba_prompt(Language source, Language target, const std::string& source_text,
                               const std::string& translation, const GembaExemplars& exemplars);

struct GembaOptions {
  std::string model_id = "gpt-4";
  RetryPolicy retry;
  int parallelism = 4;
};

struct GembaResult {
  std::vector<QeAnnotation> annotations;  // input order
  double mean_weight = 0.0;
};

// Annotates every (source, hypothesis) pair. An unparseable reply is retried
// once, then recorded as a critical parse failure with weight 10.
GembaResult gemba_mqm(const std::vector<std::pair<std::string, std::string>>& segments, Language source,
                      Language target, ChatProviderClient& provider, const GembaExemplars& exemplars,
                      const GembaOptions& options = {});

// Arithmetic mean of per-segment weights. Throws InputError when empty.
double aggregate_qe(const std::vector<QeAnnotation>& annotations);

}  // namespace adt
