#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace adt {

enum class Language { kEn, kDe, kFr, kIt };

inline constexpr std::array<Language, 4> kAllLanguages = {Language::kEn, Language::kDe,
                                                          Language::kFr, Language::kIt};

// ISO 639-1 code ("en", "de", ...).
std::string_view language_code(Language lang);
// English name used in prompts ("English", "German", ...).
std::string_view language_name(Language lang);
std::optional<Language> parse_language(std::string_view code);
// Like parse_language but throws InputError on unknown codes.
Language language_from_code(std::string_view code);

}  // namespace adt
