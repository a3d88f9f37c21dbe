#include <gtest/gtest.h>

#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "adt/pricing.hpp"

namespace adt {
namespace {

CostInputs inputs(Modality m) {
  CostInputs in;
  in.n_segments = 190;
  in.modality = m;
  in.avg_prompt_tokens = 60;
  in.avg_output_tokens = 20;
  in.tokens_per_multimodal_call = 4500;
  return in;
}

TEST(Pricing, Gpt4oTextOnly) {
  const auto est = estimate_cost(inputs(Modality::kTextOnly), PricingSheet::defaults(), "gpt-4o");
  // 190 * 60 * 5 / 1e6 and 190 * 20 * 15 / 1e6.
  EXPECT_NEAR(est.input_cost, 0.057, 1e-12);
  EXPECT_NEAR(est.output_cost, 0.057, 1e-12);
  EXPECT_DOUBLE_EQ(est.input_display(), 0.06);
  EXPECT_DOUBLE_EQ(est.output_display(), 0.06);
  EXPECT_DOUBLE_EQ(est.total_display(), 0.11);
  EXPECT_EQ(est.format(), "input $0.06, output $0.06, total $0.11");
}

TEST(Pricing, Gpt4oFrames) {
  const auto est = estimate_cost(inputs(Modality::kTextPlusFrames), PricingSheet::defaults(), "gpt-4o");
  EXPECT_NEAR(est.total_cost, 4.332, 1e-12);
  EXPECT_DOUBLE_EQ(est.total_display(), 4.33);
}

TEST(Pricing, Gpt4TurboTextOnly) {
  const auto est = estimate_cost(inputs(Modality::kTextOnly), PricingSheet::defaults(), "gpt-4-turbo");
  EXPECT_DOUBLE_EQ(est.input_display(), 0.11);
  EXPECT_DOUBLE_EQ(est.output_display(), 0.11);
  EXPECT_DOUBLE_EQ(est.total_display(), 0.23);
}

TEST(Pricing, Gpt4TurboFrames) {
  const auto est = estimate_cost(inputs(Modality::kTextPlusFrames), PricingSheet::defaults(), "gpt-4-turbo");
  EXPECT_NEAR(est.total_cost, 8.664, 1e-12);
  EXPECT_DOUBLE_EQ(est.total_display(), 8.66);
}

TEST(Pricing, RoundCentsAtHalves) {
  EXPECT_DOUBLE_EQ(round_cents(4.275), 4.28);
  EXPECT_DOUBLE_EQ(round_cents(0.125), 0.13);
  EXPECT_DOUBLE_EQ(round_cents(0.114), 0.11);
  EXPECT_DOUBLE_EQ(round_cents(-0.125), -0.13);
}

TEST(Pricing, ShippedSheetMatchesDefaults) {
  const auto sheet = PricingSheet::from_json(fs::read_file(std::filesystem::path(ADT_DATA_DIR) / "pricing.json"));
  EXPECT_EQ(sheet.as_of, "2024-07-12");
  EXPECT_EQ(sheet.rates("gpt-4o").input_per_million, 5.0);
  EXPECT_EQ(sheet.rates("gpt-4-turbo").output_per_million, 30.0);
  EXPECT_EQ(PricingSheet::from_json(sheet.to_json()).to_json(), sheet.to_json());
}

TEST(Pricing, Errors) {
  EXPECT_THROW(PricingSheet::defaults().rates("gpt-5"), Error);
  EXPECT_THROW(PricingSheet::from_json("{"), ConfigError);
  EXPECT_THROW(PricingSheet::from_json(R"({"models":{"m":{"input_per_million":0,"output_per_million":1}}})"),
               ConfigError);
  auto in = inputs(Modality::kTextOnly);
  in.n_segments = 0;
  EXPECT_THROW(estimate_cost(in, PricingSheet::defaults(), "gpt-4o"), InputError);
}

}  // namespace
}  // namespace adt
