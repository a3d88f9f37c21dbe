// adt: command-line front end for the ADT pipeline.
//
// Project/job commands work directly on the store directory; `serve` exposes
// the same operations over HTTP.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adt/codec.hpp"
#include "adt/config.hpp"
#include "adt/corpus.hpp"
#include "adt/fs.hpp"
#include "adt/gemba.hpp"
#include "adt/http_api.hpp"
#include "adt/human_eval.hpp"
#include "adt/metrics.hpp"
#include "adt/pricing.hpp"
#include "adt/service.hpp"
#include "adt/text.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace stdfs = std::filesystem;

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> lines;
  std::istringstream in(adt::fs::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<adt::Language> parse_language_list(const std::string& csv) {
  std::vector<adt::Language> out;
  for (const auto& code : adt::text::split(csv, ',')) {
    const auto trimmed = adt::text::trim(code);
    if (!trimmed.empty()) out.push_back(adt::language_from_code(trimmed));
  }
  return out;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

struct Globals {
  std::string config_path;
  std::string store;
  std::string provider;
};

adt::ServiceConfig load_config(const Globals& g) {
  adt::ServiceConfig c = g.config_path.empty() ? adt::ServiceConfig{} : adt::ServiceConfig::load(g.config_path);
  c.apply_env();
  if (!g.store.empty()) c.store_root = g.store;
  if (!g.provider.empty()) c.provider = g.provider;
  c.validate();
  return c;
}

std::unique_ptr<adt::ChatProviderClient> make_provider(const adt::ServiceConfig& c) {
  if (c.provider == "openai") {
    if (c.openai.api_key.empty()) throw adt::ConfigError("provider 'openai' needs ADT_PROVIDER_API_KEY");
    return std::make_unique<adt::OpenAiChatProvider>(c.openai);
  }
  return std::make_unique<adt::MockChatProvider>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio description translation pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Service configuration JSON")->check(CLI::ExistingFile);
  app.add_option("--store", g.store, "Store root directory (overrides config)");
  app.add_option("--provider", g.provider, "Chat provider: mock | openai (overrides config)");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  // project
  auto* project = app.add_subcommand("project", "Create and inspect projects");
  project->require_subcommand(1);
  auto* project_create = project->add_subcommand("create", "Upload a video and its AD script");
  std::string video_path, srt_path, source_lang = "en", default_target = "de", model;
  int frames_k = 4;
  double buffer_s = 10.0;
  project_create->add_option("--video", video_path, "Video file")->required()->check(CLI::ExistingFile);
  project_create->add_option("--srt", srt_path, "AD script (SRT)")->required()->check(CLI::ExistingFile);
  project_create->add_option("--source-lang", source_lang, "Script language");
  project_create->add_option("--target-lang", default_target, "Default target language");
  project_create->add_option("--frames", frames_k, "Frames sampled per moment");
  project_create->add_option("--buffer", buffer_s, "Search window buffer in seconds");
  project_create->add_option("--model", model, "Translation model id");
  std::string project_id;
  auto* project_get = project->add_subcommand("get", "Show a project");
  project_get->add_option("project_id", project_id)->required();
  auto* project_segments = project->add_subcommand("segments", "List segments with markup flags");
  project_segments->add_option("project_id", project_id)->required();

  // translate
  auto* translate = app.add_subcommand("translate", "Translate one segment and wait for the job");
  std::string segment_id, lang, modality = "text_only", sampling;
  std::optional<int> opt_k, opt_stride;
  std::optional<double> opt_buffer;
  bool no_wait = false;
  translate->add_option("segment_id", segment_id)->required();
  translate->add_option("--lang", lang, "Target language")->required();
  translate->add_option("--modality", modality, "text_only | text_plus_frames");
  translate->add_option("--sampling", sampling, "fixed_k | stride");
  translate->add_option("--frames", opt_k, "Frames sampled per moment");
  translate->add_option("--stride", opt_stride, "Stride in frames");
  translate->add_option("--buffer", opt_buffer, "Search window buffer in seconds");
  translate->add_flag("--no-wait", no_wait, "Print the queued job and exit");

  std::string job_id;
  auto* job = app.add_subcommand("job", "Show a translation job");
  job->add_option("job_id", job_id)->required();

  auto* frames = app.add_subcommand("frames", "Show the frames sampled for a segment");
  std::string out_dir;
  frames->add_option("segment_id", segment_id)->required();
  frames->add_option("--job", job_id, "Specific job");
  frames->add_option("--out", out_dir, "Write frame_<n>.jpg files here");

  auto* rate = app.add_subcommand("rate", "Store an SQM rating");
  std::string rater;
  int fluency = -1, adequacy = -1, usefulness = -1;
  rate->add_option("segment_id", segment_id)->required();
  rate->add_option("--rater", rater)->required();
  rate->add_option("--fluency", fluency)->required();
  rate->add_option("--adequacy", adequacy)->required();
  rate->add_option("--usefulness", usefulness)->required();
  rate->add_option("--job", job_id, "Job that produced the rated translation");

  auto* post_edit = app.add_subcommand("post-edit", "Replace a segment's translation");
  std::string edit_text;
  post_edit->add_option("segment_id", segment_id)->required();
  post_edit->add_option("--lang", lang)->required();
  post_edit->add_option("--text", edit_text)->required();

  auto* export_cmd = app.add_subcommand("export", "Export a translated SRT");
  std::string output;
  std::string export_modality;
  export_cmd->add_option("project_id", project_id)->required();
  export_cmd->add_option("--lang", lang)->required();
  export_cmd->add_option("--modality", export_modality, "Only use jobs of this modality");
  export_cmd->add_option("-o,--output", output, "Output file (default stdout)");

  auto* ratings = app.add_subcommand("ratings", "Print a project's ratings as CSV");
  ratings->add_option("project_id", project_id)->required();

  // Batch commands.
  auto* stats = app.add_subcommand("stats", "Corpus statistics per language");
  std::string manifest;
  bool as_json = false;
  stats->add_option("--manifest", manifest, "Corpus manifest JSON")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", as_json);

  auto* split = app.add_subcommand("split", "Seeded train/dev/test split");
  std::string ids_file, sidecar;
  std::uint64_t seed = 0;
  std::size_t dev_cap = 200, test_cap = 200;
  auto* ids_opt = split->add_option("--ids", ids_file, "One segment id per line")->check(CLI::ExistingFile);
  auto* sidecar_opt = split->add_option("--pairs", sidecar, "pairs.jsonl sidecar")->check(CLI::ExistingFile);
  ids_opt->excludes(sidecar_opt);
  split->add_option("--seed", seed)->required();
  split->add_option("--dev", dev_cap);
  split->add_option("--test", test_cap);
  split->add_option("-o,--output", output, "Manifest file (default stdout)");

  auto* synthesize = app.add_subcommand("synthesize", "Build a synthetic parallel corpus");
  std::string targets = "fr,it", mt = "chat";
  int parallelism = 4;
  synthesize->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  synthesize->add_option("--targets", targets, "Comma-separated target languages (en is always added)");
  synthesize->add_option("--mt", mt, "chat | deepl");
  synthesize->add_option("--parallelism", parallelism);
  synthesize->add_option("--out", out_dir)->required();

  auto* evaluate = app.add_subcommand("evaluate", "Metrics, quality estimation and rating analytics");
  evaluate->require_subcommand(1);
  auto* eval_metrics = evaluate->add_subcommand("metrics", "BLEU, METEOR-lite and chrF");
  std::string hyp_file, ref_file, src_file, src_lang, ratings_file, weights = "quadratic", exemplars;
  eval_metrics->add_option("--hyp", hyp_file)->required()->check(CLI::ExistingFile);
  eval_metrics->add_option("--ref", ref_file)->required()->check(CLI::ExistingFile);
  eval_metrics->add_option("--lang", lang, "Target language")->required();
  eval_metrics->add_flag("--json", as_json);
  auto* eval_qe = evaluate->add_subcommand("qe", "GEMBA-MQM quality estimation");
  eval_qe->add_option("--source", src_file)->required()->check(CLI::ExistingFile);
  eval_qe->add_option("--hyp", hyp_file)->required()->check(CLI::ExistingFile);
  eval_qe->add_option("--src-lang", src_lang)->required();
  eval_qe->add_option("--lang", lang, "Target language")->required();
  eval_qe->add_option("--exemplars", exemplars, "Exemplar JSON")->check(CLI::ExistingFile);
  eval_qe->add_option("--model", model);
  auto* eval_kappa = evaluate->add_subcommand("kappa", "Pairwise weighted Cohen's kappa");
  eval_kappa->add_option("--ratings", ratings_file)->required()->check(CLI::ExistingFile);
  eval_kappa->add_option("--weights", weights, "linear | quadratic");
  eval_kappa->add_option("--modality", modality);
  auto* eval_summary = evaluate->add_subcommand("summary", "Mean ratings per rater, dimension and modality");
  eval_summary->add_option("--ratings", ratings_file)->required()->check(CLI::ExistingFile);

  auto* sqm_plan = app.add_subcommand("sqm-plan", "Randomized contiguous rating blocks");
  std::size_t blocks = 4, block_len = 5;
  std::string raters_csv;
  sqm_plan->add_option("--srt", srt_path)->required()->check(CLI::ExistingFile);
  sqm_plan->add_option("--blocks", blocks);
  sqm_plan->add_option("--block-len", block_len);
  sqm_plan->add_option("--raters", raters_csv, "Comma-separated rater ids")->required();
  sqm_plan->add_option("--seed", seed)->required();

  auto* cost = app.add_subcommand("estimate-cost", "API cost estimate");
  std::int64_t n_segments = 0, prompt_tokens = 60, output_tokens = 20, call_tokens = 4500;
  std::string pricing_file;
  model = "";
  cost->add_option("--segments", n_segments)->required();
  cost->add_option("--modality", modality);
  cost->add_option("--prompt-tokens", prompt_tokens);
  cost->add_option("--output-tokens", output_tokens);
  cost->add_option("--call-tokens", call_tokens, "Tokens per multimodal call");
  cost->add_option("--model", model, "Model id in the pricing sheet");
  cost->add_option("--pricing", pricing_file, "Pricing sheet JSON")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      adt::ServiceConfig c = load_config(g);
      if (!host.empty()) c.host = host;
      if (port >= 0) c.port = port;
      adt::Runtime rt(c);
      adt::HttpApiOptions api_options;
      api_options.max_upload_bytes = c.max_upload_bytes;
      api_options.default_settings.model_id = c.model_id;
      adt::HttpApi api(*rt.service, api_options);
      httplib::Server server;
      api.install(server);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << c.host << ":" << c.port << " (store " << c.store_root.string() << ")\n";
      if (!server.listen(c.host, c.port)) {
        std::cerr << "error: cannot listen on " << c.host << ":" << c.port << "\n";
        return 1;
      }
      return 0;
    }

    if (*project || *translate || *job || *frames || *rate || *post_edit || *export_cmd || *ratings) {
      adt::ServiceConfig c = load_config(g);
      adt::Runtime rt(c);
      adt::Service& svc = *rt.service;

      if (*project_create) {
        adt::ProjectSettings s;
        s.source_language = adt::language_from_code(source_lang);
        s.default_target = adt::language_from_code(default_target);
        s.sampler.k = frames_k;
        s.buffer_s = buffer_s;
        s.model_id = model.empty() ? c.model_id : model;
        const auto p = svc.create_project({stdfs::path(video_path).filename().string(), adt::fs::read_file(video_path)},
                                          {stdfs::path(srt_path).filename().string(), adt::fs::read_file(srt_path)}, s);
        print_json(adt::HttpApi::project_json(p));
      } else if (*project_get) {
        print_json(adt::HttpApi::project_json(svc.get_project(project_id)));
      } else if (*project_segments) {
        print_json(adt::HttpApi::segments_json(svc.list_segments(project_id)));
      } else if (*translate) {
        adt::TranslateCommand cmd;
        cmd.target = adt::language_from_code(lang);
        cmd.modality = adt::parse_modality(modality);
        if (sampling == "stride") cmd.frames.mode = adt::SamplingMode::kStride;
        else if (sampling == "fixed_k") cmd.frames.mode = adt::SamplingMode::kFixedK;
        else if (!sampling.empty()) throw adt::InputError("unknown sampling mode '" + sampling + "'");
        cmd.frames.k = opt_k;
        cmd.frames.stride_frames = opt_stride;
        cmd.frames.buffer_s = opt_buffer;
        auto j = svc.translate_segment(segment_id, cmd);
        if (!no_wait) j = svc.wait_job(j.id, std::chrono::minutes(30));
        print_json(adt::HttpApi::job_json(j));
        if (j.status == adt::JobStatus::kFailed) return 1;
      } else if (*job) {
        print_json(adt::HttpApi::job_json(svc.get_job(job_id)));
      } else if (*frames) {
        const auto preview =
            svc.get_frames(segment_id, job_id.empty() ? std::nullopt : std::optional<std::string>(job_id));
        if (!out_dir.empty()) {
          stdfs::create_directories(out_dir);
          for (std::size_t i = 0; i < preview.images.size(); ++i) {
            adt::fs::write_file_atomic(stdfs::path(out_dir) / ("frame_" + std::to_string(i) + ".jpg"),
                                       preview.images[i]);
          }
        }
        print_json(adt::HttpApi::frames_json(preview, false));
      } else if (*rate) {
        adt::SqmRating r;
        r.rater_id = rater;
        r.fluency = fluency;
        r.adequacy = adequacy;
        r.usefulness = usefulness;
        const auto stored =
            svc.submit_rating(segment_id, r, job_id.empty() ? std::nullopt : std::optional<std::string>(job_id));
        print_json(json(stored));
      } else if (*post_edit) {
        svc.post_edit(segment_id, adt::language_from_code(lang), edit_text);
      } else if (*export_cmd) {
        std::optional<adt::Modality> m;
        if (!export_modality.empty()) m = adt::parse_modality(export_modality);
        const auto srt = svc.export_script(project_id, adt::language_from_code(lang), m);
        if (output.empty()) {
          std::cout << srt;
        } else {
          adt::fs::write_file_atomic(output, srt);
        }
      } else if (*ratings) {
        std::cout << svc.ratings_csv(project_id);
      }
      return 0;
    }

    if (*stats) {
      const auto rows = adt::compute_stats_by_language(adt::load_corpus(manifest));
      std::cout << (as_json ? adt::stats_json(rows) : adt::stats_table(rows));
      return 0;
    }

    if (*split) {
      std::vector<std::string> ids;
      if (!sidecar.empty()) {
        ids = adt::read_sidecar_ids(sidecar);
      } else if (!ids_file.empty()) {
        for (auto& line : read_lines(ids_file)) {
          if (!adt::text::trim(line).empty()) ids.push_back(std::string(adt::text::trim(line)));
        }
      } else {
        throw adt::InputError("split needs --ids or --pairs");
      }
      const auto m = adt::split_corpus(ids, seed, dev_cap, test_cap);
      if (output.empty()) {
        std::cout << m.to_json();
      } else {
        adt::fs::write_file_atomic(output, m.to_json());
      }
      std::cerr << "train " << m.train.size() << ", dev " << m.dev.size() << ", test " << m.test.size() << "\n";
      return 0;
    }

    if (*synthesize) {
      const adt::ServiceConfig c = load_config(g);
      const auto entries = adt::load_corpus(manifest);
      std::unique_ptr<adt::ChatProviderClient> chat;
      std::unique_ptr<adt::MtProviderClient> client;
      if (mt == "deepl") {
        adt::DeepLConfig d;
        if (const char* key = std::getenv("ADT_DEEPL_API_KEY")) d.auth_key = key;
        if (d.auth_key.empty()) throw adt::ConfigError("--mt deepl needs ADT_DEEPL_API_KEY");
        client = std::make_unique<adt::DeepLClient>(d);
      } else if (mt == "chat") {
        chat = make_provider(c);
        client = std::make_unique<adt::ChatMtClient>(*chat, c.model_id);
      } else {
        throw adt::InputError("unknown --mt '" + mt + "'");
      }
      adt::SyntheticOptions options;
      options.targets = parse_language_list(targets);
      options.parallelism = parallelism;
      const auto corpus = adt::generate_synthetic_pairs(entries, *client, options);
      adt::write_parallel_corpus(corpus, out_dir);
      std::cerr << corpus.records.size() << " segments, " << corpus.gap_count() << " gaps\n";
      return 0;
    }

    if (*eval_metrics) {
      const auto report = adt::evaluate_corpus(read_lines(hyp_file), read_lines(ref_file), adt::language_from_code(lang));
      if (as_json) {
        std::cout << report.to_json() << "\n";
      } else {
        std::printf("BLEU %.2f  METEOR %.2f  chrF %.2f  (n=%zu)\n", report.bleu, report.meteor, report.chrf,
                    report.n_segments);
      }
      return 0;
    }

    if (*eval_qe) {
      const adt::ServiceConfig c = load_config(g);
      const auto sources = read_lines(src_file);
      const auto hyps = read_lines(hyp_file);
      if (sources.size() != hyps.size()) throw adt::Error("alignment_error", "source and hypothesis line counts differ");
      std::vector<std::pair<std::string, std::string>> segments;
      for (std::size_t i = 0; i < sources.size(); ++i) segments.emplace_back(sources[i], hyps[i]);
      auto provider = make_provider(c);
      adt::GembaOptions options;
      if (!model.empty()) options.model_id = model;
      options.retry = c.retry;
      const auto ex = exemplars.empty() ? adt::GembaExemplars::defaults() : adt::GembaExemplars::load(exemplars);
      const auto result = adt::gemba_mqm(segments, adt::language_from_code(src_lang), adt::language_from_code(lang),
                                         *provider, ex, options);
      json per = json::array();
      for (const auto& a : result.annotations) per.push_back({{"weight", a.weight}, {"parse_failure", a.parse_failure}});
      print_json({{"mean_weight", result.mean_weight}, {"segments", per}});
      return 0;
    }

    if (*eval_kappa) {
      const auto rs = adt::ratings_from_csv(adt::fs::read_file(ratings_file));
      adt::KappaWeights w;
      if (weights == "quadratic") w = adt::KappaWeights::kQuadratic;
      else if (weights == "linear") w = adt::KappaWeights::kLinear;
      else throw adt::InputError("unknown weights '" + weights + "'");
      std::optional<adt::Modality> m;
      if (eval_kappa->count("--modality")) m = adt::parse_modality(modality);
      json out = json::array();
      for (const auto& k : adt::pairwise_kappa(rs, w, m)) {
        out.push_back({{"rater_a", k.rater_a}, {"rater_b", k.rater_b}, {"dimension", k.dimension},
                       {"kappa", k.kappa}, {"weights", adt::kappa_weights_name(k.weights)}, {"n", k.n}});
      }
      print_json(out);
      return 0;
    }

    if (*eval_summary) {
      const auto rs = adt::ratings_from_csv(adt::fs::read_file(ratings_file));
      std::printf("%-10s %-11s %-17s %6s %5s\n", "rater", "dimension", "modality", "mean", "n");
      for (const auto& m : adt::rating_summary(rs)) {
        std::printf("%-10s %-11s %-17s %6.2f %5zu\n", m.rater_id.c_str(),
                    std::string(adt::dimension_name(m.dimension)).c_str(), m.modality.c_str(), m.mean, m.count);
      }
      return 0;
    }

    if (*sqm_plan) {
      adt::ParseOptions po;
      po.mode = adt::ParseMode::kLenient;
      const auto script = adt::parse_script(adt::fs::read_file(srt_path), po);
      std::vector<std::string> raters;
      for (const auto& r : adt::text::split(raters_csv, ',')) {
        if (!adt::text::trim(r).empty()) raters.emplace_back(adt::text::trim(r));
      }
      const auto plan = adt::build_sqm_batches(script, blocks, block_len, raters, seed);
      json bj = json::array();
      for (const auto& b : plan.blocks) bj.push_back({{"first", b.first}, {"length", b.length}});
      json modal = json::object();
      for (const auto& [pos, m] : plan.modality) {
        modal[std::to_string(script.segments[pos].index)] = std::string(adt::modality_name(m));
      }
      print_json({{"seed", plan.seed}, {"blocks", bj}, {"rater_orders", plan.rater_orders}, {"modality", modal}});
      return 0;
    }

    if (*cost) {
      const auto sheet =
          pricing_file.empty() ? adt::PricingSheet::defaults() : adt::PricingSheet::from_json(adt::fs::read_file(pricing_file));
      adt::CostInputs in;
      in.n_segments = n_segments;
      in.modality = adt::parse_modality(modality);
      in.avg_prompt_tokens = prompt_tokens;
      in.avg_output_tokens = output_tokens;
      in.tokens_per_multimodal_call = call_tokens;
      const std::string model_id = model.empty() ? "gpt-4o" : model;
      const auto est = adt::estimate_cost(in, sheet, model_id);
      std::cout << model_id << " " << adt::modality_name(in.modality) << " (" << n_segments
                << " segments, pricing as of " << sheet.as_of << "): " << est.format() << "\n";
      return 0;
    }
  } catch (const adt::Error& e) {
    std::cerr << "error [" << e.code() << (e.stage().empty() ? "" : "/" + e.stage()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
