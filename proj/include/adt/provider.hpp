#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "adt/error.hpp"
#include "adt/http_util.hpp"
#include "adt/prompt.hpp"

namespace adt {

struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::string prompt;
  std::vector<ImageAttachment> images;
};

struct ChatReply {
  std::string text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::string raw;  // provider payload, kept for debugging
  std::map<std::string, std::string> meta;
};

enum class ProviderErrorKind { kAuth, kRateLimit, kTimeout, kTransport, kMalformed, kEmptyReply };

std::string_view provider_error_kind_name(ProviderErrorKind kind);

class ProviderError : public Error {
 public:
  ProviderError(ProviderErrorKind kind, const std::string& message, std::string raw_payload = {})
      : Error("provider_error", message), kind_(kind), raw_(std::move(raw_payload)) {}

  ProviderErrorKind kind() const noexcept { return kind_; }
  const std::string& raw_payload() const noexcept { return raw_; }
  // Rate limits, timeouts and transport failures are worth retrying.
  bool retryable() const noexcept {
    return kind_ == ProviderErrorKind::kRateLimit || kind_ == ProviderErrorKind::kTimeout ||
           kind_ == ProviderErrorKind::kTransport;
  }

 private:
  ProviderErrorKind kind_;
  std::string raw_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{8000};
};

// One chat turn: text plus optional images in, text plus token usage out.
// Implementations must be safe to share across threads.
class ChatProviderClient {
 public:
  virtual ~ChatProviderClient() = default;
  virtual ChatReply complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Deterministic offline provider. Replies "OK:<first 16 hex of sha256(prompt)>"
// with synthetic usage: one input token per whitespace-separated prompt word
// plus 1000 per image, one output token.
class MockChatProvider final : public ChatProviderClient {
 public:
  ChatReply complete(const ChatRequest& request) override;
  std::string name() const override { return "mock"; }
  static std::string expected_reply(std::string_view prompt);
  std::size_t calls() const;

 private:
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

// Replays a scripted sequence of replies and failures, then falls back to the
// mock echo. Records every request it sees.
class ScriptedChatProvider final : public ChatProviderClient {
 public:
  struct Step {
    std::optional<ProviderErrorKind> error;
    std::string text;
  };

  ScriptedChatProvider& reply(std::string text);
  ScriptedChatProvider& fail(ProviderErrorKind kind);

  ChatReply complete(const ChatRequest& request) override;
  std::string name() const override { return "scripted"; }
  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mutex_;
  std::deque<Step> steps_;
  std::vector<ChatRequest> requests_;
  MockChatProvider echo_;
};

// Wraps a callable; handy for tests and adapters.
class FunctionChatProvider final : public ChatProviderClient {
 public:
  explicit FunctionChatProvider(std::function<ChatReply(const ChatRequest&)> fn, std::string name = "function")
      : fn_(std::move(fn)), name_(std::move(name)) {}
  ChatReply complete(const ChatRequest& request) override { return fn_(request); }
  std::string name() const override { return name_; }

 private:
  std::function<ChatReply(const ChatRequest&)> fn_;
  std::string name_;
};

// Calls provider.complete, retrying retryable ProviderErrors with exponential
// backoff (base_delay * 2^attempt, capped at max_delay). `retries` receives the
// number of retries performed, also when the final attempt throws.
ChatReply complete_with_retry(ChatProviderClient& provider, const ChatRequest& request, const RetryPolicy& policy,
                              int& retries);

struct OpenAiConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
  int max_connections = 4;

  // ADT_PROVIDER_URL, ADT_PROVIDER_API_KEY (falls back to OPENAI_API_KEY).
  static OpenAiConfig from_env();
};

// OpenAI-compatible chat completions client; images go as base64 data URLs.
class OpenAiChatProvider final : public ChatProviderClient {
 public:
  explicit OpenAiChatProvider(OpenAiConfig config);
  ChatReply complete(const ChatRequest& request) override;
  std::string name() const override { return "openai"; }

  static std::string encode_request(const ChatRequest& request);
  // Throws ProviderError(kMalformed) when the body has no message content.
  static ChatReply decode_response(const std::string& body);

 private:
  OpenAiConfig config_;
  ConnectionLimiter limiter_;
};

}  // namespace adt
