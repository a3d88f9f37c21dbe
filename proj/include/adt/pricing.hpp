#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "adt/prompt.hpp"

namespace adt {

struct ModelRates {
  double input_per_million = 0.0;
  double output_per_million = 0.0;
};

// Per-model token prices, per one million tokens.
struct PricingSheet {
  std::string as_of;
  std::string currency = "USD";
  std::map<std::string, ModelRates> models;

  // gpt-4o 5/15 and gpt-4-turbo 10/30 USD, as of 2024-07-12.
  static PricingSheet defaults();
  // Throws ConfigError on malformed JSON or non-positive rates.
  static PricingSheet from_json(const std::string& text);
  std::string to_json() const;
  // Throws Error("pricing_error") for unknown models.
  const ModelRates& rates(const std::string& model_id) const;
};

struct CostInputs {
  std::int64_t n_segments = 0;
  Modality modality = Modality::kTextOnly;
  std::int64_t avg_prompt_tokens = 60;
  std::int64_t avg_output_tokens = 20;
  std::int64_t tokens_per_multimodal_call = 4500;
};

double round_cents(double amount);

struct CostEstimate {
  double input_cost = 0.0;
  double output_cost = 0.0;
  double total_cost = 0.0;  // unrounded input + output

  double input_display() const { return round_cents(input_cost); }
  double output_display() const { return round_cents(output_cost); }
  double total_display() const { return round_cents(total_cost); }
  std::string format(const std::string& currency_symbol = "$") const;
};

// input = n * tokens_in * rate_in / 1e6, output likewise; the displayed total
// rounds the unrounded sum.
CostEstimate estimate_cost(const CostInputs& inputs, const PricingSheet& sheet, const std::string& model_id);

}  // namespace adt
