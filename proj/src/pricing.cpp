#include "adt/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "adt/error.hpp"
#include "json.hpp"

namespace adt {

using nlohmann::json;

PricingSheet PricingSheet::defaults() {
  PricingSheet sheet;
  sheet.as_of = "2024-07-12";
  sheet.currency = "USD";
  sheet.models["gpt-4o"] = {5.0, 15.0};
  sheet.models["gpt-4-turbo"] = {10.0, 30.0};
  return sheet;
}

PricingSheet PricingSheet::from_json(const std::string& text) {
  PricingSheet sheet;
  try {
    const json j = json::parse(text);
    sheet.as_of = j.value("as_of", std::string());
    sheet.currency = j.value("currency", std::string("USD"));
    for (const auto& [name, r] : j.at("models").items()) {
      ModelRates rates{r.at("input_per_million").get<double>(), r.at("output_per_million").get<double>()};
      if (!(rates.input_per_million > 0.0) || !(rates.output_per_million > 0.0)) {
        throw ConfigError("pricing for '" + name + "' must have positive rates");
      }
      sheet.models[name] = rates;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed pricing sheet: ") + e.what());
  }
  return sheet;
}

std::string PricingSheet::to_json() const {
  json models_json = json::object();
  for (const auto& [name, r] : models) {
    models_json[name] = {{"input_per_million", r.input_per_million}, {"output_per_million", r.output_per_million}};
  }
  return json{{"as_of", as_of}, {"currency", currency}, {"models", models_json}}.dump(2) + "\n";
}

const ModelRates& PricingSheet::rates(const std::string& model_id) const {
  const auto it = models.find(model_id);
  if (it == models.end()) throw Error("pricing_error", "no pricing for model '" + model_id + "'");
  return it->second;
}

double round_cents(double amount) {
  // The nudge absorbs binary representation error at exact half cents
  // (4.275 is stored as 4.27499999...).
  const double scaled = amount * 100.0;
  const double nudge = 1e-9 * std::max(1.0, std::fabs(scaled));
  return std::round(scaled + (scaled >= 0 ? nudge : -nudge)) / 100.0;
}

std::string CostEstimate::format(const std::string& currency_symbol) const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "input %s%.2f, output %s%.2f, total %s%.2f", currency_symbol.c_str(),
                input_display(), currency_symbol.c_str(), output_display(), currency_symbol.c_str(), total_display());
  return buf;
}

CostEstimate estimate_cost(const CostInputs& in, const PricingSheet& sheet, const std::string& model_id) {
  const ModelRates& rates = sheet.rates(model_id);
  const std::int64_t tokens_in =
      in.modality == Modality::kTextOnly ? in.avg_prompt_tokens : in.tokens_per_multimodal_call;
  if (in.n_segments <= 0 || tokens_in <= 0 || in.avg_output_tokens <= 0) {
    throw InputError("estimate_cost: segment and token counts must be positive");
  }
  const double n = static_cast<double>(in.n_segments);
  CostEstimate est;
  est.input_cost = n * static_cast<double>(tokens_in) * rates.input_per_million / 1e6;
  est.output_cost = n * static_cast<double>(in.avg_output_tokens) * rates.output_per_million / 1e6;
  est.total_cost = est.input_cost + est.output_cost;
  return est;
}

}  // namespace adt
