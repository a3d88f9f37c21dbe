#include "adt/language.hpp"

#include "adt/error.hpp"

namespace adt {

std::string_view language_code(Language lang) {
  switch (lang) {
    case Language::kEn: return "en";
    case Language::kDe: return "de";
    case Language::kFr: return "fr";
    case Language::kIt: return "it";
  }
  return "en";
}

std::string_view language_name(Language lang) {
  switch (lang) {
    case Language::kEn: return "English";
    case Language::kDe: return "German";
    case Language::kFr: return "French";
    case Language::kIt: return "Italian";
  }
  return "English";
}

std::optional<Language> parse_language(std::string_view code) {
  for (Language lang : kAllLanguages) {
    if (language_code(lang) == code) return lang;
  }
  return std::nullopt;
}

Language language_from_code(std::string_view code) {
  if (auto lang = parse_language(code)) return *lang;
  throw InputError("unsupported language code '" + std::string(code) +
                   "' (expected one of en, de, fr, it)");
}

}  // namespace adt
