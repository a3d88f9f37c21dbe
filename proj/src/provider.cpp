#include "adt/provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "adt/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adt {

using nlohmann::json;

std::string_view provider_error_kind_name(ProviderErrorKind kind) {
  switch (kind) {
    case ProviderErrorKind::kAuth: return "auth";
    case ProviderErrorKind::kRateLimit: return "rate_limit";
    case ProviderErrorKind::kTimeout: return "timeout";
    case ProviderErrorKind::kTransport: return "transport";
    case ProviderErrorKind::kMalformed: return "malformed";
    case ProviderErrorKind::kEmptyReply: return "empty_reply";
  }
  return "transport";
}

ChatReply complete_with_retry(ChatProviderClient& provider, const ChatRequest& request, const RetryPolicy& policy,
                              int& retries) {
  retries = 0;
  while (true) {
    try {
      return provider.complete(request);
    } catch (const ProviderError& e) {
      if (!e.retryable() || retries >= policy.max_retries) throw;
      const auto delay = std::min<std::chrono::milliseconds>(policy.max_delay, policy.base_delay * (1LL << std::min(retries, 20)));
      ++retries;
      std::this_thread::sleep_for(delay);
    }
  }
}

std::string MockChatProvider::expected_reply(std::string_view prompt) {
  return "OK:" + text::sha256_hex(prompt).substr(0, 16);
}

ChatReply MockChatProvider::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  ChatReply reply;
  reply.text = expected_reply(request.prompt);
  reply.input_tokens = static_cast<std::int64_t>(text::split_ws(request.prompt).size()) +
                       1000 * static_cast<std::int64_t>(request.images.size());
  reply.output_tokens = 1;
  reply.raw = reply.text;
  reply.meta["provider"] = "mock";
  return reply;
}

std::size_t MockChatProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

ScriptedChatProvider& ScriptedChatProvider::reply(std::string text) {
  std::lock_guard lock(mutex_);
  steps_.push_back({std::nullopt, std::move(text)});
  return *this;
}

ScriptedChatProvider& ScriptedChatProvider::fail(ProviderErrorKind kind) {
  std::lock_guard lock(mutex_);
  steps_.push_back({kind, {}});
  return *this;
}

ChatReply ScriptedChatProvider::complete(const ChatRequest& request) {
  Step step;
  bool scripted = false;
  {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    if (!steps_.empty()) {
      step = std::move(steps_.front());
      steps_.pop_front();
      scripted = true;
    }
  }
  if (!scripted) return echo_.complete(request);
  if (step.error) {
    throw ProviderError(*step.error, "scripted " + std::string(provider_error_kind_name(*step.error)) + " failure",
                        "{\"scripted\":true}");
  }
  ChatReply reply;
  reply.text = step.text;
  reply.input_tokens = static_cast<std::int64_t>(text::split_ws(request.prompt).size());
  reply.output_tokens = static_cast<std::int64_t>(text::split_ws(step.text).size());
  reply.raw = step.text;
  return reply;
}

std::vector<ChatRequest> ScriptedChatProvider::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

OpenAiConfig OpenAiConfig::from_env() {
  OpenAiConfig c;
  if (const char* url = std::getenv("ADT_PROVIDER_URL"); url && *url) c.base_url = url;
  if (const char* key = std::getenv("ADT_PROVIDER_API_KEY"); key && *key) {
    c.api_key = key;
  } else if (const char* fallback = std::getenv("OPENAI_API_KEY"); fallback && *fallback) {
    c.api_key = fallback;
  }
  return c;
}

OpenAiChatProvider::OpenAiChatProvider(OpenAiConfig config)
    : config_(std::move(config)), limiter_(config_.max_connections) {}

std::string OpenAiChatProvider::encode_request(const ChatRequest& request) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", request.prompt}});
  for (const auto& img : request.images) {
    content.push_back(
        {{"type", "image_url"}, {"image_url", {{"url", "data:" + img.mime + ";base64," + text::base64_encode(img.bytes)}}}});
  }
  json body = {{"model", request.model},
               {"temperature", request.temperature},
               {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  return body.dump();
}

ChatReply OpenAiChatProvider::decode_response(const std::string& body) {
  ChatReply reply;
  reply.raw = body;
  try {
    const json j = json::parse(body);
    const auto& msg = j.at("choices").at(0).at("message");
    if (!msg.contains("content") || !msg["content"].is_string()) {
      throw ProviderError(ProviderErrorKind::kMalformed, "provider reply has no text content", body);
    }
    reply.text = msg["content"].get<std::string>();
    if (j.contains("usage")) {
      reply.input_tokens = j["usage"].value("prompt_tokens", 0);
      reply.output_tokens = j["usage"].value("completion_tokens", 0);
    }
    if (j.contains("model") && j["model"].is_string()) reply.meta["model"] = j["model"].get<std::string>();
    if (j.contains("id") && j["id"].is_string()) reply.meta["id"] = j["id"].get<std::string>();
  } catch (const json::exception& e) {
    throw ProviderError(ProviderErrorKind::kMalformed, std::string("malformed provider reply: ") + e.what(), body);
  }
  return reply;
}

ChatReply OpenAiChatProvider::complete(const ChatRequest& request) {
  ConnectionLimiter::Permit permit(limiter_);
  auto client = make_client(config_.base_url, config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
  auto res = client->Post(config_.path, headers, encode_request(request), "application/json");
  if (!res) {
    const auto err = res.error();
    const auto kind = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout
                          ? ProviderErrorKind::kTimeout
                          : ProviderErrorKind::kTransport;
    throw ProviderError(kind, "provider request failed: " + httplib::to_string(err));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw ProviderError(ProviderErrorKind::kAuth, "provider rejected credentials (HTTP " + std::to_string(status) + ")",
                        res->body);
  }
  if (status == 429) throw ProviderError(ProviderErrorKind::kRateLimit, "provider rate limit (HTTP 429)", res->body);
  if (status == 408 || status == 504) {
    throw ProviderError(ProviderErrorKind::kTimeout, "provider timeout (HTTP " + std::to_string(status) + ")", res->body);
  }
  if (status >= 500) {
    throw ProviderError(ProviderErrorKind::kTransport, "provider error (HTTP " + std::to_string(status) + ")", res->body);
  }
  if (status != 200) {
    throw ProviderError(ProviderErrorKind::kMalformed, "unexpected provider status " + std::to_string(status),
                        res->body);
  }
  return decode_response(res->body);
}

}  // namespace adt
