#include "adt/store.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "adt/codec.hpp"
#include "adt/error.hpp"
#include "adt/fs.hpp"

namespace adt {

namespace stdfs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kProjectPrefix = "prj-";
constexpr std::string_view kJobPrefix = "job-";

std::string format_id(std::string_view prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(n));
  return std::string(prefix) + buf;
}

std::optional<std::uint64_t> parse_id(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  name.remove_prefix(prefix.size());
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), n);
  if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
  return n;
}

bool valid_id(const std::string& id, std::string_view prefix) { return parse_id(id, prefix).has_value(); }

json read_json(const stdfs::path& path) {
  try {
    return json::parse(fs::read_file(path));
  } catch (const json::exception& e) {
    throw Error("store_error", "corrupt document " + path.string() + ": " + e.what());
  }
}

void write_json(const stdfs::path& path, const json& j) { fs::write_file_atomic(path, j.dump(2) + "\n"); }

bool is_temp_file(const stdfs::path& p) { return p.filename().string().find(".tmp.") != std::string::npos; }

}  // namespace

void ProjectSettings::validate() const {
  sampler.validate();
  if (!(buffer_s >= 0.0)) throw ValidationError("buffer_s must be non-negative");
  if (model_id.empty()) throw ValidationError("model_id must not be empty");
  if (source_language == default_target) throw ValidationError("default target equals source language");
}

const AdSegment& Project::segment(std::uint32_t index) const {
  for (const auto& s : script.segments) {
    if (s.index == index) return s;
  }
  throw NotFoundError("segment " + make_segment_id(id, index) + " not found");
}

std::string make_segment_id(const std::string& project_id, std::uint32_t index) {
  return project_id + "-" + std::to_string(index);
}

std::pair<std::string, std::uint32_t> split_segment_id(const std::string& segment_id) {
  const auto dash = segment_id.rfind('-');
  if (dash == std::string::npos || dash == 0) throw NotFoundError("malformed segment id '" + segment_id + "'");
  std::string project = segment_id.substr(0, dash);
  std::string_view tail(segment_id);
  tail.remove_prefix(dash + 1);
  std::uint32_t index = 0;
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), index);
  if (tail.empty() || ec != std::errc() || ptr != tail.data() + tail.size() || !valid_id(project, kProjectPrefix)) {
    throw NotFoundError("malformed segment id '" + segment_id + "'");
  }
  return {project, index};
}

std::string_view job_status_name(JobStatus s) {
  switch (s) {
    case JobStatus::kQueued: return "queued";
    case JobStatus::kRunning: return "running";
    case JobStatus::kDone: return "done";
    case JobStatus::kFailed: return "failed";
  }
  return "unknown";
}

JobStatus parse_job_status(std::string_view name) {
  if (name == "queued") return JobStatus::kQueued;
  if (name == "running") return JobStatus::kRunning;
  if (name == "done") return JobStatus::kDone;
  if (name == "failed") return JobStatus::kFailed;
  throw InputError("unknown job status '" + std::string(name) + "'");
}

void TranslationJob::advance(JobStatus next) {
  const bool ok = (status == JobStatus::kQueued && next == JobStatus::kRunning) ||
                  (status == JobStatus::kRunning && (next == JobStatus::kDone || next == JobStatus::kFailed));
  if (!ok) {
    throw Error("invalid_transition", "job " + id + ": " + std::string(job_status_name(status)) + " -> " +
                                          std::string(job_status_name(next)));
  }
  if (next == JobStatus::kDone && !result) throw Error("invalid_transition", "job " + id + " done without result");
  status = next;
  updated_at = fs::utc_timestamp();
}

void to_json(json& j, const ProjectSettings& s) {
  j = {{"sampler", s.sampler},
       {"model_id", s.model_id},
       {"source_language", language_code(s.source_language)},
       {"default_target", language_code(s.default_target)},
       {"buffer_s", s.buffer_s}};
}

void from_json(const json& j, ProjectSettings& s) {
  s = ProjectSettings{};
  if (j.contains("sampler")) s.sampler = j["sampler"].get<SamplerConfig>();
  if (j.contains("frames")) s.sampler.k = j["frames"].get<int>();
  s.model_id = j.value("model_id", s.model_id);
  if (j.contains("source_language")) s.source_language = language_from_code(j["source_language"].get<std::string>());
  if (j.contains("default_target")) s.default_target = language_from_code(j["default_target"].get<std::string>());
  s.buffer_s = j.value("buffer_s", s.buffer_s);
}

void to_json(json& j, const Project& p) {
  json segments = json::array();
  for (const auto& s : p.script.segments) {
    json sj = s;
    sj["segment_id"] = make_segment_id(p.id, s.index);
    segments.push_back(std::move(sj));
  }
  j = {{"id", p.id},
       {"media_file", p.media_file},
       {"media_name", p.media_name},
       {"media", p.media},
       {"language", language_code(p.script.language)},
       {"source_id", p.script.source_id},
       {"segments", std::move(segments)},
       {"warnings", p.warnings},
       {"created_at", p.created_at},
       {"settings", p.settings}};
}

void from_json(const json& j, Project& p) {
  p.id = j.at("id").get<std::string>();
  p.media_file = j.at("media_file").get<std::string>();
  p.media_name = j.value("media_name", p.media_file);
  p.media = j.at("media").get<MediaInfo>();
  p.script.language = language_from_code(j.at("language").get<std::string>());
  p.script.source_id = j.value("source_id", std::string());
  p.script.segments = j.at("segments").get<std::vector<AdSegment>>();
  p.warnings = j.value("warnings", std::vector<ParseWarning>{});
  p.created_at = j.value("created_at", std::string());
  p.settings = j.value("settings", ProjectSettings{});
}

void to_json(json& j, const JobError& e) { j = {{"code", e.code}, {"stage", e.stage}, {"message", e.message}}; }

void from_json(const json& j, JobError& e) {
  e.code = j.at("code").get<std::string>();
  e.stage = j.value("stage", std::string());
  e.message = j.value("message", std::string());
}

void to_json(json& j, const TranslationJob& job) {
  j = {{"id", job.id},
       {"seq", job.seq},
       {"project_id", job.project_id},
       {"segment_id", job.segment_id},
       {"segment_index", job.segment_index},
       {"modality", modality_name(job.modality)},
       {"target_lang", language_code(job.target)},
       {"sampler", job.sampler},
       {"buffer_s", job.buffer_s},
       {"status", job_status_name(job.status)},
       {"result", nullptr},
       {"error", nullptr},
       {"english_text", job.english_text},
       {"window", nullptr},
       {"moment", nullptr},
       {"grounding_fallback", job.grounding_fallback},
       {"frame_indices", job.frame_indices},
       {"frame_timestamps", job.frame_timestamps},
       {"warnings", job.warnings},
       {"created_at", job.created_at},
       {"updated_at", job.updated_at}};
  if (job.result) j["result"] = *job.result;
  if (job.error) j["error"] = *job.error;
  if (job.window) j["window"] = *job.window;
  if (job.moment) j["moment"] = *job.moment;
}

void from_json(const json& j, TranslationJob& job) {
  job = TranslationJob{};
  job.id = j.at("id").get<std::string>();
  job.seq = j.value("seq", std::uint64_t{0});
  job.project_id = j.at("project_id").get<std::string>();
  job.segment_id = j.at("segment_id").get<std::string>();
  job.segment_index = j.at("segment_index").get<std::uint32_t>();
  job.modality = parse_modality(j.at("modality").get<std::string>());
  job.target = language_from_code(j.at("target_lang").get<std::string>());
  job.sampler = j.value("sampler", SamplerConfig{});
  job.buffer_s = j.value("buffer_s", 10.0);
  job.status = parse_job_status(j.at("status").get<std::string>());
  if (j.contains("result") && !j["result"].is_null()) job.result = j["result"].get<TranslationResult>();
  if (j.contains("error") && !j["error"].is_null()) job.error = j["error"].get<JobError>();
  job.english_text = j.value("english_text", std::string());
  if (j.contains("window") && !j["window"].is_null()) job.window = j["window"].get<SearchWindow>();
  if (j.contains("moment") && !j["moment"].is_null()) job.moment = j["moment"].get<MomentCandidate>();
  job.grounding_fallback = j.value("grounding_fallback", false);
  job.frame_indices = j.value("frame_indices", std::vector<std::int64_t>{});
  job.frame_timestamps = j.value("frame_timestamps", std::vector<double>{});
  job.warnings = j.value("warnings", std::vector<std::string>{});
  job.created_at = j.value("created_at", std::string());
  job.updated_at = j.value("updated_at", std::string());
}

Store::Store(stdfs::path root) : root_(std::move(root)) {
  for (const char* sub : {"projects", "jobs", "frames_cache", "staging"}) stdfs::create_directories(root_ / sub);

  std::error_code ec;
  for (const auto& entry : stdfs::directory_iterator(root_ / "staging")) stdfs::remove_all(entry.path(), ec);
  for (const auto& entry : stdfs::recursive_directory_iterator(root_)) {
    if (entry.is_regular_file() && is_temp_file(entry.path())) stdfs::remove(entry.path(), ec);
  }

  for (const auto& entry : stdfs::directory_iterator(root_ / "projects")) {
    if (auto n = parse_id(entry.path().filename().string(), kProjectPrefix)) {
      next_project_ = std::max(next_project_, *n + 1);
    }
  }
  for (const auto& entry : stdfs::directory_iterator(root_ / "jobs")) {
    if (auto n = parse_id(entry.path().stem().string(), kJobPrefix)) next_job_ = std::max(next_job_, *n + 1);
  }
}

stdfs::path Store::project_dir(const std::string& project_id) const {
  if (!valid_id(project_id, kProjectPrefix)) throw NotFoundError("project " + project_id + " not found");
  return root_ / "projects" / project_id;
}

stdfs::path Store::media_path(const Project& project) const {
  return project_dir(project.id) / project.media_file;
}

stdfs::path Store::job_frames_dir(const std::string& job_id) const {
  if (!valid_id(job_id, kJobPrefix)) throw NotFoundError("job " + job_id + " not found");
  return root_ / "jobs" / job_id;
}

std::string Store::allocate_project_id() {
  std::lock_guard lock(ids_mutex_);
  return format_id(kProjectPrefix, next_project_++);
}

std::string Store::allocate_job_id(std::uint64_t& seq) {
  std::lock_guard lock(ids_mutex_);
  seq = next_job_++;
  return format_id(kJobPrefix, seq);
}

stdfs::path Store::create_staging() {
  std::uint64_t n;
  {
    std::lock_guard lock(ids_mutex_);
    n = next_staging_++;
  }
  auto dir = root_ / "staging" / (std::to_string(::getpid()) + "-" + std::to_string(n));
  stdfs::remove_all(dir);
  stdfs::create_directories(dir);
  return dir;
}

void Store::commit_staging(const stdfs::path& staging, const Project& project) {
  write_json(staging / "project.json", project);
  const auto target = project_dir(project.id);
  if (stdfs::exists(target)) throw Error("store_error", "project " + project.id + " already exists");
  stdfs::rename(staging, target);
  fs::sync_directory(target.parent_path());
}

void Store::discard_staging(const stdfs::path& staging) noexcept {
  std::error_code ec;
  stdfs::remove_all(staging, ec);
}

void Store::save_project(const Project& project) {
  std::lock_guard lock(project_mutex(project.id));
  write_json(project_dir(project.id) / "project.json", project);
}

Project Store::load_project(const std::string& project_id) const {
  const auto path = project_dir(project_id) / "project.json";
  if (!stdfs::exists(path)) throw NotFoundError("project " + project_id + " not found");
  return read_json(path).get<Project>();
}

bool Store::has_project(const std::string& project_id) const {
  return valid_id(project_id, kProjectPrefix) && stdfs::exists(root_ / "projects" / project_id / "project.json");
}

std::vector<std::string> Store::list_projects() const {
  std::vector<std::string> ids;
  for (const auto& entry : stdfs::directory_iterator(root_ / "projects")) {
    const auto name = entry.path().filename().string();
    if (valid_id(name, kProjectPrefix) && stdfs::exists(entry.path() / "project.json")) ids.push_back(name);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void Store::save_job(const TranslationJob& job) {
  if (!valid_id(job.id, kJobPrefix)) throw InputError("invalid job id '" + job.id + "'");
  write_json(root_ / "jobs" / (job.id + ".json"), job);
}

TranslationJob Store::load_job(const std::string& job_id) const {
  if (!valid_id(job_id, kJobPrefix)) throw NotFoundError("job " + job_id + " not found");
  const auto path = root_ / "jobs" / (job_id + ".json");
  if (!stdfs::exists(path)) throw NotFoundError("job " + job_id + " not found");
  return read_json(path).get<TranslationJob>();
}

std::vector<TranslationJob> Store::list_jobs() const {
  std::vector<TranslationJob> jobs;
  for (const auto& entry : stdfs::directory_iterator(root_ / "jobs")) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json" || is_temp_file(entry.path())) continue;
    if (!valid_id(entry.path().stem().string(), kJobPrefix)) continue;
    jobs.push_back(read_json(entry.path()).get<TranslationJob>());
  }
  std::sort(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
  return jobs;
}

std::vector<SqmRating> Store::load_ratings(const std::string& project_id) const {
  const auto path = project_dir(project_id) / "ratings.json";
  if (!stdfs::exists(path)) return {};
  return read_json(path).get<std::vector<SqmRating>>();
}

void Store::append_rating(const std::string& project_id, const SqmRating& rating) {
  std::lock_guard lock(project_mutex(project_id));
  auto ratings = load_ratings(project_id);
  ratings.push_back(rating);
  write_json(project_dir(project_id) / "ratings.json", ratings);
}

std::map<std::string, std::string> Store::load_post_edits(const std::string& project_id) const {
  const auto path = project_dir(project_id) / "post_edits.json";
  if (!stdfs::exists(path)) return {};
  return read_json(path).get<std::map<std::string, std::string>>();
}

void Store::set_post_edit(const std::string& project_id, const std::string& key, const std::string& text) {
  std::lock_guard lock(project_mutex(project_id));
  auto edits = load_post_edits(project_id);
  edits[key] = text;
  write_json(project_dir(project_id) / "post_edits.json", edits);
}

std::string Store::post_edit_key(const std::string& segment_id, Language lang) {
  return segment_id + "|" + std::string(language_code(lang));
}

std::mutex& Store::project_mutex(const std::string& project_id) {
  std::lock_guard lock(locks_mutex_);
  auto& slot = project_locks_[project_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

}  // namespace adt
