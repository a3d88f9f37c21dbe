#include "adt/human_eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <sstream>

#include "adt/error.hpp"
#include "adt/rng.hpp"
#include "adt/text.hpp"

namespace adt {

std::string_view dimension_name(SqmDimension d) {
  switch (d) {
    case SqmDimension::kFluency: return "fluency";
    case SqmDimension::kAdequacy: return "adequacy";
    case SqmDimension::kUsefulness: return "usefulness";
  }
  return "fluency";
}

int SqmRating::score(SqmDimension d) const {
  switch (d) {
    case SqmDimension::kFluency: return fluency;
    case SqmDimension::kAdequacy: return adequacy;
    case SqmDimension::kUsefulness: return usefulness;
  }
  return fluency;
}

void SqmRating::validate() const {
  if (rater_id.empty()) throw ValidationError("rating needs a rater id");
  if (segment_id.empty()) throw ValidationError("rating needs a segment id");
  for (SqmDimension d : kSqmDimensions) {
    const int v = score(d);
    if (v < 0 || v > 6) {
      throw ValidationError(std::string(dimension_name(d)) + " score " + std::to_string(v) + " is outside 0-6");
    }
  }
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < csv.size() && csv[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

int parse_score(const std::string& s, std::size_t line) {
  const auto t = text::trim(s);
  if (t.empty() || t.find_first_not_of("-0123456789") != std::string_view::npos) {
    throw ValidationError("ratings CSV line " + std::to_string(line) + ": bad score '" + s + "'");
  }
  return std::stoi(std::string(t));
}

}  // namespace

std::string ratings_to_csv(const std::vector<SqmRating>& ratings) {
  std::string out = "rater_id,segment_id,modality,fluency,adequacy,usefulness\n";
  for (const auto& r : ratings) {
    out += csv_field(r.rater_id) + "," + csv_field(r.segment_id) + "," +
           (r.modality ? std::string(modality_name(*r.modality)) : std::string()) + "," + std::to_string(r.fluency) +
           "," + std::to_string(r.adequacy) + "," + std::to_string(r.usefulness) + "\n";
  }
  return out;
}

std::vector<SqmRating> ratings_from_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  std::vector<SqmRating> out;
  if (rows.empty()) return out;
  const std::vector<std::string> expected = {"rater_id", "segment_id", "modality", "fluency", "adequacy", "usefulness"};
  if (rows.front() != expected) throw ValidationError("ratings CSV header must be: rater_id,segment_id,modality,fluency,adequacy,usefulness");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != expected.size()) {
      throw ValidationError("ratings CSV line " + std::to_string(i + 1) + ": expected 6 fields");
    }
    SqmRating r;
    r.rater_id = row[0];
    r.segment_id = row[1];
    if (!row[2].empty()) r.modality = parse_modality(row[2]);
    r.fluency = parse_score(row[3], i + 1);
    r.adequacy = parse_score(row[4], i + 1);
    r.usefulness = parse_score(row[5], i + 1);
    r.validate();
    out.push_back(std::move(r));
  }
  return out;
}

SqmPlan build_sqm_batches(const AdScript& script, std::size_t n_blocks, std::size_t block_len,
                          const std::vector<std::string>& raters, std::uint64_t seed) {
  if (n_blocks == 0 || block_len == 0) throw InputError("block count and length must be positive");
  const std::size_t n = script.segments.size();
  if (n < n_blocks * block_len) {
    throw InputError("script has " + std::to_string(n) + " segments; " + std::to_string(n_blocks) + " blocks of " +
                     std::to_string(block_len) + " need " + std::to_string(n_blocks * block_len));
  }
  std::set<std::string> unique_raters(raters.begin(), raters.end());
  if (unique_raters.size() != raters.size()) throw InputError("rater ids must be unique");

  PortableRng rng(seed);
  // Stars and bars: pick n_blocks distinct slots out of n - n_blocks*(len-1)
  // and spread them by (len - 1) per preceding block.
  const std::size_t slots = n - n_blocks * (block_len - 1);
  std::vector<std::size_t> pool(slots);
  for (std::size_t i = 0; i < slots; ++i) pool[i] = i;
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(slots - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_blocks));
  std::sort(chosen.begin(), chosen.end());

  SqmPlan plan;
  plan.seed = seed;
  for (std::size_t i = 0; i < n_blocks; ++i) plan.blocks.push_back({chosen[i] + i * (block_len - 1), block_len});
  for (const auto& rater : raters) {
    std::vector<std::size_t> order(n_blocks);
    for (std::size_t i = 0; i < n_blocks; ++i) order[i] = i;
    rng.shuffle(order);
    plan.rater_orders[rater] = std::move(order);
  }
  for (const auto& block : plan.blocks) {
    for (std::size_t p = block.first; p < block.first + block.length; ++p) {
      plan.modality[p] = rng.coin() ? Modality::kTextPlusFrames : Modality::kTextOnly;
    }
  }
  return plan;
}

std::string_view kappa_weights_name(KappaWeights w) { return w == KappaWeights::kLinear ? "linear" : "quadratic"; }

KappaReport weighted_kappa(std::span<const int> a, std::span<const int> b, int categories, KappaWeights weights) {
  if (a.size() != b.size()) throw InputError("kappa: rating vectors differ in length");
  if (a.empty()) throw InputError("kappa: no ratings");
  if (categories < 2) throw InputError("kappa: need at least two categories");
  const auto k = static_cast<std::size_t>(categories);
  std::vector<double> observed(k * k, 0.0);
  std::vector<double> row(k, 0.0);
  std::vector<double> col(k, 0.0);
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || a[i] >= categories || b[i] < 0 || b[i] >= categories) {
      throw InputError("kappa: rating outside 0.." + std::to_string(categories - 1));
    }
    const auto x = static_cast<std::size_t>(a[i]);
    const auto y = static_cast<std::size_t>(b[i]);
    observed[x * k + y] += 1.0 / n;
    row[x] += 1.0 / n;
    col[y] += 1.0 / n;
  }
  double obs = 0.0;
  double exp = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = (static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(k - 1);
      const double w = weights == KappaWeights::kLinear ? std::abs(d) : d * d;
      obs += w * observed[i * k + j];
      exp += w * row[i] * col[j];
    }
  }
  if (exp <= 0.0) {
    throw Error("undefined_kappa", "kappa undefined: zero expected disagreement (both raters constant and identical)");
  }
  KappaReport rep;
  rep.kappa = 1.0 - obs / exp;
  rep.weights = weights;
  rep.n = a.size();
  return rep;
}

std::vector<KappaReport> pairwise_kappa(const std::vector<SqmRating>& ratings, KappaWeights weights,
                                        std::optional<Modality> modality) {
  std::map<std::string, std::map<std::string, const SqmRating*>> by_rater;
  for (const auto& r : ratings) {
    if (modality && r.modality != modality) continue;
    by_rater[r.rater_id][r.segment_id] = &r;
  }
  std::vector<KappaReport> out;
  for (auto a = by_rater.begin(); a != by_rater.end(); ++a) {
    for (auto b = std::next(a); b != by_rater.end(); ++b) {
      for (SqmDimension d : kSqmDimensions) {
        std::vector<int> xs;
        std::vector<int> ys;
        for (const auto& [seg, ra] : a->second) {
          const auto it = b->second.find(seg);
          if (it == b->second.end()) continue;
          xs.push_back(ra->score(d));
          ys.push_back(it->second->score(d));
        }
        if (xs.empty()) continue;
        KappaReport rep = weighted_kappa(xs, ys, 7, weights);
        rep.rater_a = a->first;
        rep.rater_b = b->first;
        rep.dimension = std::string(dimension_name(d));
        out.push_back(std::move(rep));
      }
    }
  }
  return out;
}

std::vector<RatingMean> rating_summary(const std::vector<SqmRating>& ratings) {
  if (ratings.empty()) throw InputError("rating_summary: no ratings");
  std::map<std::tuple<std::string, int, std::string>, std::pair<double, std::size_t>> acc;
  for (const auto& r : ratings) {
    const std::string mod = r.modality ? std::string(modality_name(*r.modality)) : "unknown";
    for (SqmDimension d : kSqmDimensions) {
      auto& slot = acc[{r.rater_id, static_cast<int>(d), mod}];
      slot.first += r.score(d);
      slot.second += 1;
    }
  }
  std::vector<RatingMean> out;
  for (const auto& [key, v] : acc) {
    out.push_back({std::get<0>(key), static_cast<SqmDimension>(std::get<1>(key)), std::get<2>(key),
                   v.first / static_cast<double>(v.second), v.second});
  }
  return out;
}

}  // namespace adt
