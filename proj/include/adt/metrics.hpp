#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adt/language.hpp"

namespace adt {

// All corpus metrics take aligned hypothesis/reference lists of equal,
// non-zero length (Error "alignment_error" otherwise) and report on a 0-100
// scale.

// Splits on whitespace and separates punctuation characters into their own
// tokens. `lowercase` folds ASCII and Latin letters.
std::vector<std::string> tokenize(std::string_view s, bool lowercase);

// Corpus BLEU: clipped 1-4-gram precisions, geometric mean, brevity penalty.
// A zero precision of order n becomes 1 / (2 * hypothesis n-gram count);
// orders with no hypothesis n-grams in the whole corpus are left out of the
// mean, and a corpus without any hypothesis n-grams scores 0. Case-sensitive.
double bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

// Corpus chrF: character 1-6-grams with whitespace removed, beta = 2, the
// per-order F-scores averaged over orders that occur in both hypothesis and
// reference.
double chrf(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

// Light suffix-stripping stemmer used by meteor_lite.
std::string light_stem(std::string_view lower_token, Language lang);

// METEOR without the synonym/paraphrase stages: exact then stemmed unigram
// matches, Fmean = 10PR / (R + 9P), penalty 0.5 * (chunks / matches)^3,
// segment scores averaged. Tokens are lowercased with punctuation split off.
double meteor_lite(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
                   Language lang = Language::kEn);

struct MetricReport {
  double bleu = 0.0;
  double meteor = 0.0;
  double chrf = 0.0;
  std::size_t n_segments = 0;

  std::string to_json() const;
};

MetricReport evaluate_corpus(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references,
                             Language target_lang);

// One cell group of the results table: a system/modality row evaluated on one
// language pair.
struct MetricRow {
  std::string system;    // e.g. "gpt-4o"
  std::string modality;  // e.g. "text-only", "text + 4 frames"
  std::string pair;      // e.g. "EN->DE"
  MetricReport report;
};

// Rows = (system, modality), column groups = language pairs, each with BLEU,
// METEOR and chrF.
std::string format_metric_table(const std::vector<MetricRow>& rows);

}  // namespace adt
