#pragma once

// Filesystem persistence for projects, jobs, ratings and post-edits.
//
// Layout under the root:
//   projects/<project_id>/project.json, media/<file>, ratings.json, post_edits.json
//   jobs/<job_id>.json, jobs/<job_id>/frame_<n>.jpg
//   frames_cache/   decoder cache
//   staging/        projects under construction
//   audit.jsonl     provider request/response log

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "adt/frames.hpp"
#include "adt/grounding.hpp"
#include "adt/human_eval.hpp"
#include "adt/prompt.hpp"
#include "adt/srt.hpp"
#include "adt/translator.hpp"
#include "json.hpp"

namespace adt {

struct ProjectSettings {
  SamplerConfig sampler;
  std::string model_id = "gpt-4o";
  Language source_language = Language::kEn;
  Language default_target = Language::kDe;
  double buffer_s = 10.0;

  void validate() const;
};

struct Project {
  std::string id;
  std::string media_file;  // relative to the project directory
  std::string media_name;  // original upload name
  MediaInfo media;
  AdScript script;
  std::vector<ParseWarning> warnings;
  std::string created_at;
  ProjectSettings settings;

  const AdSegment& segment(std::uint32_t index) const;
};

std::string make_segment_id(const std::string& project_id, std::uint32_t index);
// Splits "<project_id>-<index>"; throws NotFoundError on a malformed id.
std::pair<std::string, std::uint32_t> split_segment_id(const std::string& segment_id);

enum class JobStatus { kQueued, kRunning, kDone, kFailed };
std::string_view job_status_name(JobStatus s);
JobStatus parse_job_status(std::string_view name);

struct JobError {
  std::string code;
  std::string stage;
  std::string message;
};

struct TranslationJob {
  std::string id;
  std::uint64_t seq = 0;
  std::string project_id;
  std::string segment_id;
  std::uint32_t segment_index = 0;
  Modality modality = Modality::kTextOnly;
  Language target = Language::kDe;
  SamplerConfig sampler;
  double buffer_s = 10.0;
  JobStatus status = JobStatus::kQueued;
  std::optional<TranslationResult> result;
  std::optional<JobError> error;

  // Pipeline record.
  std::string english_text;
  std::optional<SearchWindow> window;
  std::optional<MomentCandidate> moment;
  bool grounding_fallback = false;
  std::vector<std::int64_t> frame_indices;
  std::vector<double> frame_timestamps;
  std::vector<std::string> warnings;

  std::string created_at;
  std::string updated_at;

  // Enforces queued -> running -> {done, failed}.
  void advance(JobStatus next);
  bool active() const { return status == JobStatus::kQueued || status == JobStatus::kRunning; }
};

void to_json(nlohmann::json& j, const ProjectSettings& s);
void from_json(const nlohmann::json& j, ProjectSettings& s);
void to_json(nlohmann::json& j, const Project& p);
void from_json(const nlohmann::json& j, Project& p);
void to_json(nlohmann::json& j, const JobError& e);
void from_json(const nlohmann::json& j, JobError& e);
void to_json(nlohmann::json& j, const TranslationJob& job);
void from_json(const nlohmann::json& j, TranslationJob& job);

class Store {
 public:
  // Creates the layout and removes leftovers of interrupted writes.
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path project_dir(const std::string& project_id) const;
  std::filesystem::path media_path(const Project& project) const;
  std::filesystem::path job_frames_dir(const std::string& job_id) const;
  std::filesystem::path frames_cache_dir() const { return root_ / "frames_cache"; }
  std::filesystem::path audit_path() const { return root_ / "audit.jsonl"; }

  std::string allocate_project_id();
  std::string allocate_job_id(std::uint64_t& seq);

  // Projects are assembled in a staging directory and renamed into place.
  std::filesystem::path create_staging();
  void commit_staging(const std::filesystem::path& staging, const Project& project);
  void discard_staging(const std::filesystem::path& staging) noexcept;

  void save_project(const Project& project);
  Project load_project(const std::string& project_id) const;
  bool has_project(const std::string& project_id) const;
  std::vector<std::string> list_projects() const;

  void save_job(const TranslationJob& job);
  TranslationJob load_job(const std::string& job_id) const;
  std::vector<TranslationJob> list_jobs() const;

  std::vector<SqmRating> load_ratings(const std::string& project_id) const;
  void append_rating(const std::string& project_id, const SqmRating& rating);

  // Keyed by post_edit_key(segment_id, lang).
  std::map<std::string, std::string> load_post_edits(const std::string& project_id) const;
  void set_post_edit(const std::string& project_id, const std::string& key, const std::string& text);
  static std::string post_edit_key(const std::string& segment_id, Language lang);

 private:
  std::mutex& project_mutex(const std::string& project_id);

  std::filesystem::path root_;
  std::mutex ids_mutex_;
  std::uint64_t next_project_ = 1;
  std::uint64_t next_job_ = 1;
  std::uint64_t next_staging_ = 1;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> project_locks_;
};

}  // namespace adt
