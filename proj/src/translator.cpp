#include "adt/translator.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "adt/fs.hpp"
#include "adt/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adt {

using nlohmann::json;

void AuditLog::record(const std::string& json_line) {
  std::lock_guard lock(mutex_);
  fs::append_line(path_, json_line);
}

std::string sanitize_reply(std::string_view reply) {
  std::string_view s = text::trim(reply);
  if (s.size() >= 6 && text::starts_with(s, "```") && s.substr(s.size() - 3) == "```") {
    s.remove_suffix(3);
    const auto nl = s.find('\n');
    s = nl == std::string_view::npos ? s.substr(3) : s.substr(nl + 1);
    s = text::trim(s);
  }
  return std::string(s);
}

TranslationResult translate(const TranslationRequest& request, ChatProviderClient& provider,
                            const TranslateOptions& options) {
  const RenderedPrompt prompt = build_prompt(request, options.prompts);
  ChatRequest chat{request.model_id, request.temperature, prompt.text, prompt.images};

  auto audit = [&](const std::string& outcome, const ChatReply* reply, const std::string& error, int retries,
                   std::int64_t latency) {
    if (!options.audit) return;
    json line = {{"ts", fs::utc_timestamp()},
                 {"provider", provider.name()},
                 {"model", request.model_id},
                 {"source", language_code(request.source)},
                 {"target", language_code(request.target)},
                 {"modality", modality_name(request.modality())},
                 {"segment", request.segment.index},
                 {"prompt", prompt.text},
                 {"images", prompt.images.size()},
                 {"outcome", outcome},
                 {"retries", retries},
                 {"latency_ms", latency}};
    if (reply) {
      line["reply"] = reply->raw;
      line["input_tokens"] = reply->input_tokens;
      line["output_tokens"] = reply->output_tokens;
    }
    if (!error.empty()) line["error"] = error;
    options.audit->record(line.dump());
  };

  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  };

  int retries = 0;
  ChatReply reply;
  try {
    reply = complete_with_retry(provider, chat, options.retry, retries);
  } catch (const ProviderError& e) {
    audit("error", nullptr, std::string(provider_error_kind_name(e.kind())) + ": " + e.what(), retries, elapsed_ms());
    throw;
  }
  TranslationResult result;
  result.output_text = sanitize_reply(reply.text);
  if (result.output_text.empty()) {
    audit("empty_reply", &reply, "empty reply", retries, elapsed_ms());
    throw ProviderError(ProviderErrorKind::kEmptyReply,
                        "provider returned an empty translation for segment " + std::to_string(request.segment.index),
                        reply.raw);
  }
  result.input_tokens = std::max<std::int64_t>(0, reply.input_tokens);
  result.output_tokens = std::max<std::int64_t>(0, reply.output_tokens);
  result.latency_ms = elapsed_ms();
  result.retry_count = retries;
  result.provider_meta = reply.meta;
  result.provider_meta["provider"] = provider.name();
  audit("ok", &reply, {}, retries, result.latency_ms);
  return result;
}

PivotResult translate_with_pivot(const TranslationRequest& request, ChatProviderClient& provider,
                                 const TranslateOptions& options) {
  request.validate();
  if (request.source == Language::kEn) throw InputError("pivot translation needs a non-English source");
  if (request.target == Language::kEn) throw InputError("pivot translation needs a non-English target");

  PivotResult out;
  TranslationRequest first = request;
  first.target = Language::kEn;
  first.frames.reset();
  try {
    out.to_english = translate(first, provider, options);
  } catch (Error& e) {
    e.set_stage("pivot");
    throw;
  }

  TranslationRequest second = request;
  second.source = Language::kEn;
  second.segment.raw_text = out.to_english.output_text;
  second.segment.clean_text = out.to_english.output_text;
  try {
    out.to_target = translate(second, provider, options);
  } catch (Error& e) {
    e.set_stage("target");
    throw;
  }
  return out;
}

std::string ChatMtClient::translate(const std::string& text, Language source, Language target) {
  TranslationRequest req;
  req.source = source;
  req.target = target;
  req.segment.clean_text = text;
  req.segment.raw_text = text;
  req.model_id = model_;
  return adt::translate(req, provider_, options_).output_text;
}

std::string DeepLClient::translate(const std::string& text, Language source, Language target) {
  std::string tgt(language_code(target));
  std::transform(tgt.begin(), tgt.end(), tgt.begin(), ::toupper);
  if (tgt == "EN") tgt = "EN-GB";
  std::string src(language_code(source));
  std::transform(src.begin(), src.end(), src.begin(), ::toupper);

  const auto url = split_url(config_.url);
  auto client = make_client(url.origin, config_.timeout);
  httplib::Headers headers = {{"Authorization", "DeepL-Auth-Key " + config_.auth_key}};
  httplib::Params params = {{"text", text}, {"source_lang", src}, {"target_lang", tgt}};
  auto res = client->Post(url.path, headers, params);
  if (!res) throw ProviderError(ProviderErrorKind::kTransport, "DeepL request failed: " + httplib::to_string(res.error()));
  if (res->status == 403) throw ProviderError(ProviderErrorKind::kAuth, "DeepL rejected credentials", res->body);
  if (res->status == 429) throw ProviderError(ProviderErrorKind::kRateLimit, "DeepL rate limit", res->body);
  if (res->status != 200) {
    throw ProviderError(ProviderErrorKind::kTransport, "DeepL HTTP " + std::to_string(res->status), res->body);
  }
  try {
    return json::parse(res->body).at("translations").at(0).at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(ProviderErrorKind::kMalformed, std::string("malformed DeepL reply: ") + e.what(), res->body);
  }
}

}  // namespace adt
