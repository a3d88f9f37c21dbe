#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adt/prompt.hpp"
#include "adt/srt.hpp"

namespace adt {

enum class SqmDimension { kFluency, kAdequacy, kUsefulness };
inline constexpr SqmDimension kSqmDimensions[] = {SqmDimension::kFluency, SqmDimension::kAdequacy,
                                                  SqmDimension::kUsefulness};
std::string_view dimension_name(SqmDimension d);

// One rater's 0-6 scores for one segment. `modality` is what produced the
// translation; it is withheld from raters and only used in analysis.
struct SqmRating {
  std::string rater_id;
  std::string segment_id;
  int fluency = 0;
  int adequacy = 0;
  int usefulness = 0;
  std::optional<Modality> modality;

  int score(SqmDimension d) const;
  // Throws ValidationError if a score is outside 0-6 or an id is empty.
  void validate() const;
  friend bool operator==(const SqmRating&, const SqmRating&) = default;
};

// CSV columns: rater_id,segment_id,modality,fluency,adequacy,usefulness
// (modality may be empty). Fields containing commas or quotes are quoted.
std::string ratings_to_csv(const std::vector<SqmRating>& ratings);
std::vector<SqmRating> ratings_from_csv(std::string_view csv);

struct SqmBlock {
  std::size_t first = 0;  // position in script.segments
  std::size_t length = 0;
};

struct SqmPlan {
  std::vector<SqmBlock> blocks;  // ascending position
  // Per rater: a permutation of block ids (indices into `blocks`).
  std::map<std::string, std::vector<std::size_t>> rater_orders;
  // Per segment position inside a block: the modality used for translation.
  std::map<std::size_t, Modality> modality;
  std::uint64_t seed = 0;
};

// Samples n_blocks non-overlapping runs of block_len consecutive segments
// (uniform over placements), gives each rater the same blocks in an
// independently shuffled order and picks text-only or text+frames per segment
// by a fair coin. Throws InputError when the script is too short.
SqmPlan build_sqm_batches(const AdScript& script, std::size_t n_blocks, std::size_t block_len,
                          const std::vector<std::string>& raters, std::uint64_t seed);

enum class KappaWeights { kLinear, kQuadratic };
std::string_view kappa_weights_name(KappaWeights w);

struct KappaReport {
  std::string rater_a;
  std::string rater_b;
  std::string dimension;
  double kappa = 0.0;
  KappaWeights weights = KappaWeights::kQuadratic;
  std::size_t n = 0;
};

// Cohen's weighted kappa over categories 0..categories-1 with disagreement
// weights |i-j|/(k-1) (linear) or ((i-j)/(k-1))^2 (quadratic). Throws
// Error("undefined_kappa") when expected disagreement is zero and
// InputError on misaligned or out-of-range input.
KappaReport weighted_kappa(std::span<const int> a, std::span<const int> b, int categories = 7,
                           KappaWeights weights = KappaWeights::kQuadratic);

// Kappa per rater pair and dimension over the segments both raters scored,
// optionally restricted to one modality.
std::vector<KappaReport> pairwise_kappa(const std::vector<SqmRating>& ratings, KappaWeights weights,
                                        std::optional<Modality> modality = std::nullopt);

struct RatingMean {
  std::string rater_id;
  SqmDimension dimension = SqmDimension::kFluency;
  std::string modality;  // "text_only", "text_plus_frames" or "unknown"
  double mean = 0.0;
  std::size_t count = 0;
};

// Means grouped by (rater, dimension, modality). Throws InputError when empty.
std::vector<RatingMean> rating_summary(const std::vector<SqmRating>& ratings);

}  // namespace adt
