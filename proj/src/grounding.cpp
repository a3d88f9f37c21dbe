#include "adt/grounding.hpp"

#include <algorithm>
#include <cmath>

#include "adt/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adt {

using nlohmann::json;

namespace {
constexpr double kEps = 1e-9;
}

SearchWindow compute_window(const AdSegment& segment, double video_duration_s, double buffer_s) {
  if (!(video_duration_s > 0.0)) throw InputError("video duration must be positive");
  if (!(buffer_s >= 0.0)) throw InputError("buffer must be non-negative");
  const double onset = segment.onset.to_seconds();
  const double offset = segment.offset.to_seconds();
  if (offset > video_duration_s + kEps) {
    throw InputError("segment " + std::to_string(segment.index) + " ends after the video");
  }
  SearchWindow w;
  w.buffer_s = buffer_s;
  w.start_s = std::max(0.0, onset - buffer_s);
  w.end_s = std::min(video_duration_s, offset + buffer_s);
  if (!(w.start_s < w.end_s)) throw InputError("empty search window for segment " + std::to_string(segment.index));
  return w;
}

std::vector<MomentCandidate> FallbackGroundingBackend::propose(const SearchWindow& window, const std::string&,
                                                               const std::string&) {
  return {MomentCandidate{window.start_s, window.end_s, 1.0}};
}

HttpGroundingBackend::HttpGroundingBackend(HttpGroundingConfig config)
    : config_(std::move(config)), url_(split_url(config_.url)), limiter_(config_.max_connections) {}

std::string HttpGroundingBackend::encode_request(const SearchWindow& window, const std::string& media_ref,
                                                 const std::string& query_text_en) {
  return json{{"media_ref", media_ref},
              {"window", {{"start_s", window.start_s}, {"end_s", window.end_s}}},
              {"query", query_text_en}}
      .dump();
}

std::vector<MomentCandidate> HttpGroundingBackend::decode_response(const std::string& body) {
  std::vector<MomentCandidate> out;
  try {
    const json j = json::parse(body);
    for (const auto& c : j.at("candidates")) {
      out.push_back({c.at("start_s").get<double>(), c.at("end_s").get<double>(), c.at("score").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed grounding response: ") + e.what());
  }
  return out;
}

std::vector<MomentCandidate> HttpGroundingBackend::propose(const SearchWindow& window, const std::string& media_ref,
                                                           const std::string& query_text_en) {
  const std::string body = encode_request(window, media_ref, query_text_en);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    ConnectionLimiter::Permit permit(limiter_);
    auto client = make_client(url_.origin, config_.timeout);
    auto res = client->Post(url_.path, body, "application/json");
    if (!res) {
      last_error = "grounder unreachable: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "grounder returned HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ValidationError("grounder rejected request with HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    auto candidates = decode_response(res->body);
    validate_candidates(window, candidates);
    return candidates;
  }
  throw TransportError(last_error + " (after " + std::to_string(config_.retries) + " retries)", config_.retries);
}

void validate_candidates(const SearchWindow& window, const std::vector<MomentCandidate>& candidates) {
  for (const auto& c : candidates) {
    if (!std::isfinite(c.score) || !std::isfinite(c.start_s) || !std::isfinite(c.end_s)) {
      throw ValidationError("grounding candidate has non-finite values");
    }
    if (c.start_s < window.start_s - kEps || c.end_s > window.end_s + kEps || !(c.start_s < c.end_s)) {
      throw ValidationError("grounding candidate [" + std::to_string(c.start_s) + ", " + std::to_string(c.end_s) +
                            "] is outside window [" + std::to_string(window.start_s) + ", " +
                            std::to_string(window.end_s) + "] or empty");
    }
  }
}

const MomentCandidate& select_best(const std::vector<MomentCandidate>& pool) {
  if (pool.empty()) throw InputError("select_best: empty candidate pool");
  const MomentCandidate* best = &pool.front();
  for (const auto& c : pool) {
    if (c.score > best->score) {
      best = &c;
    } else if (c.score == best->score) {
      if (c.start_s < best->start_s || (c.start_s == best->start_s && c.duration() < best->duration())) best = &c;
    }
  }
  return *best;
}

RetrievalResult retrieve_moment(const SearchWindow& window, const std::string& media_ref,
                                const std::string& query_text_en, GroundingBackend& backend) {
  auto pool = backend.propose(window, media_ref, query_text_en);
  validate_candidates(window, pool);
  RetrievalResult result;
  if (pool.empty()) {
    result.moment = {window.start_s, window.end_s, 1.0};
    result.fallback_used = true;
    result.warning = "grounder returned no candidates; using the full search window";
    return result;
  }
  result.moment = select_best(pool);
  // Clamp tolerance slack back into the window.
  result.moment.start_s = std::max(result.moment.start_s, window.start_s);
  result.moment.end_s = std::min(result.moment.end_s, window.end_s);
  return result;
}

}  // namespace adt
