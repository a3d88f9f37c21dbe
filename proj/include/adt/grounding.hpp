#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "adt/http_util.hpp"
#include "adt/srt.hpp"

namespace adt {

struct SearchWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  double buffer_s = 10.0;

  double duration() const { return end_s - start_s; }
};

// A grounded interval; higher score means more salient.
struct MomentCandidate {
  double start_s = 0.0;
  double end_s = 0.0;
  double score = 0.0;

  double duration() const { return end_s - start_s; }
  friend bool operator==(const MomentCandidate&, const MomentCandidate&) = default;
};

// [onset - buffer, offset + buffer] clamped to [0, video_duration].
// Throws InputError if video_duration <= 0, buffer < 0 or the segment ends
// after the video.
SearchWindow compute_window(const AdSegment& segment, double video_duration_s, double buffer_s = 10.0);

class GroundingBackend {
 public:
  virtual ~GroundingBackend() = default;
  virtual std::vector<MomentCandidate> propose(const SearchWindow& window, const std::string& media_ref,
                                               const std::string& query_text_en) = 0;
  virtual std::string name() const = 0;
};

// Offline backend: the whole window, score 1.0.
class FallbackGroundingBackend final : public GroundingBackend {
 public:
  std::vector<MomentCandidate> propose(const SearchWindow& window, const std::string& media_ref,
                                       const std::string& query_text_en) override;
  std::string name() const override { return "fallback"; }
};

struct HttpGroundingConfig {
  std::string url;  // full endpoint URL, e.g. http://127.0.0.1:8010/ground
  std::chrono::milliseconds timeout{10000};
  int retries = 2;  // extra attempts after the first
  int max_connections = 4;
};

// Client for the grounding wire protocol:
//   POST {"media_ref": str, "window": {"start_s": x, "end_s": y}, "query": str}
//   200  {"candidates": [{"start_s": x, "end_s": y, "score": s}, ...]}
// Transport failures and 5xx responses are retried; exhausting them throws
// TransportError carrying the retry count. Malformed bodies throw
// ValidationError.
class HttpGroundingBackend final : public GroundingBackend {
 public:
  explicit HttpGroundingBackend(HttpGroundingConfig config);
  std::vector<MomentCandidate> propose(const SearchWindow& window, const std::string& media_ref,
                                       const std::string& query_text_en) override;
  std::string name() const override { return "http"; }

  static std::string encode_request(const SearchWindow& window, const std::string& media_ref,
                                    const std::string& query_text_en);
  static std::vector<MomentCandidate> decode_response(const std::string& body);

 private:
  HttpGroundingConfig config_;
  UrlParts url_;
  ConnectionLimiter limiter_;
};

// Throws ValidationError if any candidate leaves the window, is empty or has a
// non-finite score.
void validate_candidates(const SearchWindow& window, const std::vector<MomentCandidate>& candidates);

// Highest score; ties go to the earlier start, then the shorter duration.
// Requires a non-empty pool.
const MomentCandidate& select_best(const std::vector<MomentCandidate>& pool);

struct RetrievalResult {
  MomentCandidate moment;
  bool fallback_used = false;
  std::string warning;
};

// query_text_en must be the English rendition of the AD. An empty pool yields
// the full-window fallback with a warning.
RetrievalResult retrieve_moment(const SearchWindow& window, const std::string& media_ref,
                                const std::string& query_text_en, GroundingBackend& backend);

}  // namespace adt
