#pragma once

// Project, job, rating and export orchestration on top of the Store.

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "adt/config.hpp"
#include "adt/error.hpp"
#include "adt/frames.hpp"
#include "adt/grounding.hpp"
#include "adt/store.hpp"
#include "adt/translator.hpp"

namespace adt {

class PayloadTooLargeError : public Error {
 public:
  explicit PayloadTooLargeError(const std::string& message) : Error("payload_too_large", message, "upload") {}
};

class MissingTranslationsError : public Error {
 public:
  explicit MissingTranslationsError(std::vector<std::string> segment_ids);
  const std::vector<std::string>& segment_ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

struct Upload {
  std::string filename;
  std::string bytes;
};

// Per-request overrides of the project's sampler and search buffer.
struct FrameParams {
  std::optional<SamplingMode> mode;
  std::optional<int> k;
  std::optional<int> stride_frames;
  std::optional<double> buffer_s;
};

struct TranslateCommand {
  Language target = Language::kDe;
  Modality modality = Modality::kTextOnly;
  FrameParams frames;
};

struct SegmentView {
  std::string segment_id;
  AdSegment segment;
  std::vector<std::string> warnings;
};

struct FramePreview {
  std::string job_id;
  SearchWindow window;
  MomentCandidate moment;
  bool grounding_fallback = false;
  std::vector<std::int64_t> indices;
  std::vector<double> timestamps;
  std::vector<std::string> images;  // JPEG bytes, sampling order
};

struct ServiceDeps {
  ChatProviderClient* provider = nullptr;
  GroundingBackend* grounder = nullptr;
  FrameDecoder* decoder = nullptr;
};

struct ServiceOptions {
  int workers = 4;
  std::size_t max_upload_bytes = std::size_t{512} << 20;
  TranslateOptions translate;
};

class Service {
 public:
  // Reloads persisted jobs; unfinished ones are queued again.
  Service(Store& store, ServiceDeps deps, ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Project create_project(const Upload& video, const Upload& srt, const ProjectSettings& settings);
  Project get_project(const std::string& project_id) const;
  std::vector<SegmentView> list_segments(const std::string& project_id) const;

  // Returns the active job when an identical request is queued or running.
  TranslationJob translate_segment(const std::string& segment_id, const TranslateCommand& command);
  TranslationJob get_job(const std::string& job_id) const;
  TranslationJob wait_job(const std::string& job_id, std::chrono::milliseconds timeout) const;
  std::vector<TranslationJob> jobs_for_segment(const std::string& segment_id) const;

  // Latest finished frames job for the segment unless job_id is given.
  FramePreview get_frames(const std::string& segment_id, const std::optional<std::string>& job_id = {}) const;

  SqmRating submit_rating(const std::string& segment_id, SqmRating rating,
                          const std::optional<std::string>& job_id = {});
  std::vector<SqmRating> ratings(const std::string& project_id) const;
  std::string ratings_csv(const std::string& project_id) const;

  void post_edit(const std::string& segment_id, Language lang, const std::string& text);

  // Post-edits win over machine output; otherwise the newest done job.
  std::string export_script(const std::string& project_id, Language target,
                            std::optional<Modality> modality = std::nullopt) const;

  void shutdown();

 private:
  void worker_loop(std::stop_token stop);
  void run_job(const std::string& job_id);
  void update_job(const std::string& job_id, const std::function<void(TranslationJob&)>& fn);
  std::string job_key(const TranslationJob& job) const;

  Store& store_;
  ServiceDeps deps_;
  ServiceOptions options_;

  mutable std::mutex mutex_;
  mutable std::condition_variable_any changed_;
  std::deque<std::string> queue_;
  std::map<std::string, TranslationJob> jobs_;
  std::map<std::string, std::string> active_;  // job_key -> job id
  std::vector<std::jthread> workers_;
};

// Owns everything a Service needs, built from configuration.
struct Runtime {
  explicit Runtime(ServiceConfig config);
  ~Runtime();

  ServiceConfig config;
  std::unique_ptr<Store> store;
  std::unique_ptr<AuditLog> audit;
  std::unique_ptr<ChatProviderClient> provider;
  std::unique_ptr<GroundingBackend> grounder;
  std::unique_ptr<FrameDecoder> decoder;
  std::unique_ptr<Service> service;
};

}  // namespace adt
