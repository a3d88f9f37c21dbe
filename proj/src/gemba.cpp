#include "adt/gemba.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <thread>

#include "adt/fs.hpp"
#include "adt/text.hpp"
#include "json.hpp"

namespace adt {

using nlohmann::json;

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<Severity> severity_from(std::string_view word) {
  const auto w = lower_ascii(text::trim(word));
  if (w == "minor") return Severity::kMinor;
  if (w == "major") return Severity::kMajor;
  if (w == "critical") return Severity::kCritical;
  return std::nullopt;
}

bool is_no_error(std::string_view item) {
  const auto w = lower_ascii(text::trim(item));
  return w == "no-error" || w == "no error" || w == "none" || w == "no-error." || w == "no errors";
}

ErrorSpan make_span(Severity sev, std::string_view body) {
  ErrorSpan span;
  span.severity = sev;
  const std::string_view b = text::trim(body);
  const auto dash = b.find(" - ");
  if (dash == std::string_view::npos) {
    span.category = std::string(b);
  } else {
    span.category = std::string(text::trim(b.substr(0, dash)));
    std::string_view quoted = text::trim(b.substr(dash + 3));
    if (quoted.size() >= 2 && quoted.front() == '"' && quoted.back() == '"') quoted = quoted.substr(1, quoted.size() - 2);
    span.text = std::string(quoted);
  }
  return span;
}

}  // namespace

int severity_weight(Severity s) {
  switch (s) {
    case Severity::kNone: return 0;
    case Severity::kMinor: return 1;
    case Severity::kMajor: return 5;
    case Severity::kCritical: return 10;
  }
  return 0;
}

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::kNone: return "none";
    case Severity::kMinor: return "minor";
    case Severity::kMajor: return "major";
    case Severity::kCritical: return "critical";
  }
  return "none";
}

std::optional<QeAnnotation> parse_mqm_reply(std::string_view reply) {
  QeAnnotation ann;
  ann.raw_reply = std::string(reply);
  std::optional<Severity> current;
  bool recognized = false;

  std::string normalized(reply);
  std::replace(normalized.begin(), normalized.end(), ';', '\n');
  for (std::string_view item : text::split(normalized, '\n')) {
    item = text::trim(item);
    if (item.empty()) continue;
    if (is_no_error(item)) {
      recognized = true;
      continue;
    }
    const auto colon = item.find(':');
    if (colon != std::string_view::npos) {
      if (auto sev = severity_from(item.substr(0, colon))) {
        recognized = true;
        const auto rest = text::trim(item.substr(colon + 1));
        if (rest.empty()) {
          current = sev;  // block header
        } else if (!is_no_error(rest)) {
          ann.spans.push_back(make_span(*sev, rest));
        }
        continue;
      }
    }
    if (current) {
      ann.spans.push_back(make_span(*current, item));
      continue;
    }
    // Free text outside any severity block.
    return std::nullopt;
  }
  if (!recognized) return std::nullopt;
  for (const auto& s : ann.spans) ann.weight += severity_weight(s.severity);
  return ann;
}

GembaExemplars GembaExemplars::from_json(const std::string& text_json) {
  GembaExemplars ex;
  try {
    const json j = json::parse(text_json);
    for (const auto& e : j.at("exemplars")) {
      ex.items.push_back({language_from_code(e.at("source_lang").get<std::string>()),
                          language_from_code(e.at("target_lang").get<std::string>()),
                          e.at("source").get<std::string>(), e.at("translation").get<std::string>(),
                          e.at("annotation").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed GEMBA exemplar file: ") + e.what());
  }
  if (ex.items.size() != 3) throw ConfigError("GEMBA-MQM expects exactly three exemplars, got " + std::to_string(ex.items.size()));
  return ex;
}

GembaExemplars GembaExemplars::load(const std::filesystem::path& path) { return from_json(fs::read_file(path)); }

GembaExemplars GembaExemplars::defaults() {
  GembaExemplars ex;
  ex.items = {
      {Language::kEn, Language::kDe, "She closes the curtains and switches off the lamp.",
       "Sie schließt die Vorhänge und schaltet die Lampe aus.", "Critical:\nno-error\nMajor:\nno-error\nMinor:\nno-error"},
      {Language::kEn, Language::kFr, "The train pulls into the station. Tom waves from the platform.",
       "Le train entre en gare. Tom fait signe depuis la quai.",
       "Critical:\nno-error\nMajor:\nno-error\nMinor:\nfluency/grammar - \"la quai\""},
      {Language::kDe, Language::kIt, "Der Scheinwerfer beleuchtet zwei Rehe am Waldrand.",
       "Il faro illumina due cervi al margine del bosco.",
       "Critical:\nno-error\nMajor:\naccuracy/mistranslation - \"faro\"\nMinor:\naccuracy/mistranslation - \"cervi\""},
  };
  return ex;
}

std::string build_gemba_prompt(Language source, Language target, const std::string& source_text,
                               const std::string& translation, const GembaExemplars& exemplars) {
  auto block = [](Language s, Language t, const std::string& src, const std::string& tr) {
    std::string out;
    out += std::string(language_name(s)) + " source:\n```" + src + "```\n";
    out += std::string(language_name(t)) + " translation:\n```" + tr + "```\n\n";
    out += "Based on the source segment and machine translation surrounded with triple backticks, identify error "
           "types in the translation and classify them. The categories of errors are: accuracy (addition, "
           "mistranslation, omission, untranslated text), fluency (character encoding, grammar, inconsistency, "
           "punctuation, register, spelling), style (awkward), terminology (inappropriate for context, inconsistent "
           "use), non-translation, other, or no-error.\nEach error is classified as one of three categories: "
           "critical, major, and minor. Critical errors inhibit comprehension of the text. Major errors disrupt the "
           "flow, but what the text is trying to say is still understandable. Minor errors are technically errors, "
           "but do not disrupt the flow or hinder comprehension.\n";
    return out;
  };
  std::string prompt =
      "You are an annotator for the quality of machine translation. Your task is to identify errors and assess the "
      "quality of the translation.\n\n";
  for (const auto& ex : exemplars.items) {
    prompt += block(ex.source, ex.target, ex.source_text, ex.translation);
    prompt += "\nAnnotation:\n" + ex.annotation + "\n\n";
  }
  prompt += block(source, target, source_text, translation);
  prompt += "\nAnnotation:\n";
  return prompt;
}

GembaResult gemba_mqm(const std::vector<std::pair<std::string, std::string>>& segments, Language source,
                      Language target, ChatProviderClient& provider, const GembaExemplars& exemplars,
                      const GembaOptions& options) {
  GembaResult result;
  result.annotations.resize(segments.size());
  if (segments.empty()) return result;

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= segments.size()) return;
      try {
        ChatRequest req{options.model_id, 0.0,
                        build_gemba_prompt(source, target, segments[i].first, segments[i].second, exemplars),
                        {}};
        std::optional<QeAnnotation> ann;
        std::string last_reply;
        for (int attempt = 0; attempt < 2 && !ann; ++attempt) {
          int retries = 0;
          last_reply = complete_with_retry(provider, req, options.retry, retries).text;
          ann = parse_mqm_reply(last_reply);
        }
        if (!ann) {
          ann = QeAnnotation{};
          ann->spans.push_back({Severity::kCritical, "parse-failure", "unparseable annotation reply"});
          ann->weight = severity_weight(Severity::kCritical);
          ann->parse_failure = true;
          ann->raw_reply = last_reply;
        }
        result.annotations[i] = std::move(*ann);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = segments.size();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.parallelism, static_cast<int>(segments.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  result.mean_weight = aggregate_qe(result.annotations);
  return result;
}

double aggregate_qe(const std::vector<QeAnnotation>& annotations) {
  if (annotations.empty()) throw InputError("aggregate_qe: no annotations");
  double sum = 0.0;
  for (const auto& a : annotations) sum += a.weight;
  return sum / static_cast<double>(annotations.size());
}

}  // namespace adt
