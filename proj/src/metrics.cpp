#include "adt/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "adt/error.hpp"
#include "adt/text.hpp"
#include "json.hpp"

namespace adt {

namespace {

void check_aligned(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size()) {
    throw Error("alignment_error", "hypothesis/reference count mismatch: " + std::to_string(hyps.size()) + " vs " +
                                       std::to_string(refs.size()));
  }
  if (hyps.empty()) throw InputError("metric needs at least one segment");
}

template <typename Seq>
std::map<Seq, int> count_ngrams(const std::vector<typename Seq::value_type>& items, std::size_t n) {
  std::map<Seq, int> counts;
  if (items.size() < n) return counts;
  for (std::size_t i = 0; i + n <= items.size(); ++i) {
    Seq key(items.begin() + static_cast<std::ptrdiff_t>(i), items.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++counts[key];
  }
  return counts;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s, bool lowercase) {
  std::vector<std::string> out;
  std::u32string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(text::encode_utf8(cur));
    cur.clear();
  };
  for (char32_t c : text::decode_utf8(s)) {
    if (text::is_space(c)) {
      flush();
    } else if (text::is_punct(c)) {
      flush();
      out.push_back(text::encode_utf8(std::u32string(1, c)));
    } else {
      cur.push_back(lowercase ? text::to_lower(c) : c);
    }
  }
  flush();
  return out;
}

double bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  check_aligned(hyps, refs);
  constexpr std::size_t kMaxOrder = 4;
  std::array<std::int64_t, kMaxOrder> matches{};
  std::array<std::int64_t, kMaxOrder> totals{};
  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto h = tokenize(hyps[s], false);
    const auto r = tokenize(refs[s], false);
    hyp_len += static_cast<std::int64_t>(h.size());
    ref_len += static_cast<std::int64_t>(r.size());
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto hc = count_ngrams<std::vector<std::string>>(h, n);
      const auto rc = count_ngrams<std::vector<std::string>>(r, n);
      for (const auto& [gram, cnt] : hc) {
        totals[n - 1] += cnt;
        const auto it = rc.find(gram);
        if (it != rc.end()) matches[n - 1] += std::min(cnt, it->second);
      }
    }
  }
  if (hyp_len == 0 || matches[0] == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    if (totals[n] == 0) continue;
    const double p = matches[n] > 0 ? static_cast<double>(matches[n]) / static_cast<double>(totals[n])
                                     : 1.0 / (2.0 * static_cast<double>(totals[n]));
    log_sum += std::log(p);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double bp = hyp_len >= ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_sum / orders);
}

double chrf(const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
  check_aligned(hyps, refs);
  constexpr std::size_t kMaxOrder = 6;
  constexpr double kBeta2 = 4.0;
  std::array<std::int64_t, kMaxOrder> hyp_counts{};
  std::array<std::int64_t, kMaxOrder> ref_counts{};
  std::array<std::int64_t, kMaxOrder> match_counts{};
  auto chars = [](const std::string& s) {
    std::vector<char32_t> out;
    for (char32_t c : text::decode_utf8(s)) {
      if (!text::is_space(c)) out.push_back(c);
    }
    return out;
  };
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const auto h = chars(hyps[s]);
    const auto r = chars(refs[s]);
    for (std::size_t n = 1; n <= kMaxOrder; ++n) {
      const auto hc = count_ngrams<std::u32string>(h, n);
      const auto rc = count_ngrams<std::u32string>(r, n);
      for (const auto& [gram, cnt] : hc) {
        hyp_counts[n - 1] += cnt;
        const auto it = rc.find(gram);
        if (it != rc.end()) match_counts[n - 1] += std::min(cnt, it->second);
      }
      for (const auto& [gram, cnt] : rc) ref_counts[n - 1] += cnt;
    }
  }
  double sum = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < kMaxOrder; ++n) {
    if (hyp_counts[n] == 0 || ref_counts[n] == 0) continue;
    ++orders;
    if (match_counts[n] == 0) continue;
    const double p = static_cast<double>(match_counts[n]) / static_cast<double>(hyp_counts[n]);
    const double r = static_cast<double>(match_counts[n]) / static_cast<double>(ref_counts[n]);
    sum += (1.0 + kBeta2) * p * r / (kBeta2 * p + r);
  }
  return orders == 0 ? 0.0 : 100.0 * sum / orders;
}

std::string light_stem(std::string_view token, Language lang) {
  static const std::map<Language, std::vector<std::string>> kSuffixes = {
      {Language::kEn, {"ational", "ations", "ation", "ments", "ment", "ingly", "ness", "ings", "ing", "edly", "ies",
                       "ied", "ed", "es", "ly", "s"}},
      {Language::kDe, {"ungen", "heiten", "keiten", "ung", "heit", "keit", "lich", "isch", "ern", "em", "en", "er",
                       "es", "e", "n", "s"}},
      {Language::kFr, {"issements", "issement", "ements", "ement", "ations", "ation", "euses", "euse", "eux", "ées",
                       "ée", "és", "es", "er", "ez", "é", "e", "s", "x"}},
      {Language::kIt, {"azioni", "azione", "amenti", "amento", "mente", "ando", "endo", "are", "ere", "ire", "ato",
                       "ata", "ati", "ate", "i", "e", "o", "a"}},
  };
  const auto cps = text::decode_utf8(token);
  for (const auto& suffix : kSuffixes.at(lang)) {
    const auto scps = text::decode_utf8(suffix);
    if (cps.size() >= scps.size() + 3 && cps.compare(cps.size() - scps.size(), scps.size(), scps) == 0) {
      return text::encode_utf8(cps.substr(0, cps.size() - scps.size()));
    }
  }
  return std::string(token);
}

namespace {

double meteor_segment(const std::vector<std::string>& h, const std::vector<std::string>& r, Language lang) {
  if (h.empty() || r.empty()) return 0.0;
  std::vector<long> align(h.size(), -1);  // hyp position -> ref position
  std::vector<bool> ref_used(r.size(), false);

  auto run_stage = [&](const std::vector<std::string>& hf, const std::vector<std::string>& rf) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (align[i] >= 0) continue;
      long pick = -1;
      // Prefer the reference position that extends the previous chunk.
      if (i > 0 && align[i - 1] >= 0) {
        const auto next = static_cast<std::size_t>(align[i - 1] + 1);
        if (next < r.size() && !ref_used[next] && rf[next] == hf[i]) pick = static_cast<long>(next);
      }
      for (std::size_t j = 0; pick < 0 && j < r.size(); ++j) {
        if (!ref_used[j] && rf[j] == hf[i]) pick = static_cast<long>(j);
      }
      if (pick >= 0) {
        align[i] = pick;
        ref_used[static_cast<std::size_t>(pick)] = true;
      }
    }
  };
  run_stage(h, r);
  std::vector<std::string> hs;
  std::vector<std::string> rs;
  for (const auto& t : h) hs.push_back(light_stem(t, lang));
  for (const auto& t : r) rs.push_back(light_stem(t, lang));
  run_stage(hs, rs);

  std::size_t matches = 0;
  std::size_t chunks = 0;
  long prev_i = -2;
  long prev_j = -2;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (align[i] < 0) continue;
    ++matches;
    if (!(static_cast<long>(i) == prev_i + 1 && align[i] == prev_j + 1)) ++chunks;
    prev_i = static_cast<long>(i);
    prev_j = align[i];
  }
  if (matches == 0) return 0.0;
  const double p = static_cast<double>(matches) / static_cast<double>(h.size());
  const double rc = static_cast<double>(matches) / static_cast<double>(r.size());
  const double fmean = 10.0 * p * rc / (rc + 9.0 * p);
  const double frag = static_cast<double>(chunks) / static_cast<double>(matches);
  const double penalty = 0.5 * frag * frag * frag;
  return fmean * (1.0 - penalty);
}

}  // namespace

double meteor_lite(const std::vector<std::string>& hyps, const std::vector<std::string>& refs, Language lang) {
  check_aligned(hyps, refs);
  double sum = 0.0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    sum += meteor_segment(tokenize(hyps[s], true), tokenize(refs[s], true), lang);
  }
  return 100.0 * sum / static_cast<double>(hyps.size());
}

std::string MetricReport::to_json() const {
  return nlohmann::json{{"bleu", bleu},
                        {"meteor", meteor},
                        {"chrf", chrf},
                        {"n_segments", n_segments},
                        {"meteor_variant", "meteor_lite (exact + stem, no synonyms)"}}
      .dump(2);
}

MetricReport evaluate_corpus(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                             Language target_lang) {
  MetricReport rep;
  rep.bleu = bleu(hyps, refs);
  rep.meteor = meteor_lite(hyps, refs, target_lang);
  rep.chrf = chrf(hyps, refs);
  rep.n_segments = hyps.size();
  return rep;
}

std::string format_metric_table(const std::vector<MetricRow>& rows) {
  std::vector<std::string> pairs;
  std::vector<std::pair<std::string, std::string>> systems;
  for (const auto& row : rows) {
    if (std::find(pairs.begin(), pairs.end(), row.pair) == pairs.end()) pairs.push_back(row.pair);
    const auto key = std::make_pair(row.system, row.modality);
    if (std::find(systems.begin(), systems.end(), key) == systems.end()) systems.push_back(key);
  }
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-14s %-18s", "AD Translator", "Input Modality");
  out << buf;
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof(buf), " | %-22s", p.c_str());
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%-14s %-18s", "", "");
  out << buf;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " | %6s %7s %7s", "BLEU", "METEOR", "chrF");
    out << buf;
  }
  out << "\n";
  for (const auto& [system, modality] : systems) {
    std::snprintf(buf, sizeof(buf), "%-14s %-18s", system.c_str(), modality.c_str());
    out << buf;
    for (const auto& p : pairs) {
      const auto it = std::find_if(rows.begin(), rows.end(), [&](const MetricRow& r) {
        return r.system == system && r.modality == modality && r.pair == p;
      });
      if (it == rows.end()) {
        std::snprintf(buf, sizeof(buf), " | %6s %7s %7s", "-", "-", "-");
      } else {
        std::snprintf(buf, sizeof(buf), " | %6.2f %7.2f %7.2f", it->report.bleu, it->report.meteor, it->report.chrf);
      }
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace adt
