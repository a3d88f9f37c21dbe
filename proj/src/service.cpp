#include "adt/service.hpp"

#include <algorithm>
#include <sstream>

#include "adt/fs.hpp"

namespace adt {

namespace stdfs = std::filesystem;

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

std::string safe_filename(const std::string& name) {
  std::string base = stdfs::path(name).filename().string();
  std::string out;
  for (char c : base) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '-' || c == '_';
    out += ok ? c : '_';
  }
  if (out.empty() || out.front() == '.') out = "video" + out;
  return out;
}

// Translations may contain newlines but never a blank line inside a cue.
std::string cue_text(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (line.empty()) continue;
    if (!out.empty()) out += '\n';
    out += line;
  }
  return out;
}

std::string frame_file(std::size_t i) { return "frame_" + std::to_string(i) + ".jpg"; }

}  // namespace

MissingTranslationsError::MissingTranslationsError(std::vector<std::string> segment_ids)
    : Error("missing_translations", "untranslated segments: " + join_ids(segment_ids), "export"),
      ids_(std::move(segment_ids)) {}

Service::Service(Store& store, ServiceDeps deps, ServiceOptions options)
    : store_(store), deps_(deps), options_(std::move(options)) {
  if (!deps_.provider || !deps_.grounder || !deps_.decoder) throw ConfigError("service dependencies missing");
  if (options_.workers < 1) throw ConfigError("workers must be at least 1");

  for (auto& job : store_.list_jobs()) {
    if (job.active()) {
      job.status = JobStatus::kQueued;
      active_[job_key(job)] = job.id;
      queue_.push_back(job.id);
    }
    jobs_[job.id] = std::move(job);
  }
  for (int i = 0; i < options_.workers; ++i) {
    workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
  }
}

Service::~Service() { shutdown(); }

void Service::shutdown() {
  for (auto& w : workers_) w.request_stop();
  changed_.notify_all();
  workers_.clear();
}

Project Service::create_project(const Upload& video, const Upload& srt, const ProjectSettings& settings) {
  if (video.bytes.size() + srt.bytes.size() > options_.max_upload_bytes) {
    throw PayloadTooLargeError("upload of " + std::to_string(video.bytes.size() + srt.bytes.size()) +
                               " bytes exceeds the limit of " + std::to_string(options_.max_upload_bytes));
  }
  if (video.bytes.empty()) throw InputError("video upload is empty");
  settings.validate();

  ParseOptions parse_options;
  parse_options.mode = ParseMode::kLenient;
  parse_options.language = settings.source_language;
  parse_options.source_id = stdfs::path(srt.filename).stem().string();
  ParseResult parsed;
  try {
    parsed = parse_script_with_warnings(srt.bytes, parse_options);
  } catch (Error& e) {
    e.set_stage("parse");
    throw;
  }
  if (parsed.script.segments.empty()) throw ValidationError("script contains no cues");

  const auto staging = store_.create_staging();
  try {
    Project project;
    project.media_name = video.filename;
    project.media_file = "media/" + safe_filename(video.filename);
    stdfs::create_directories(staging / "media");
    fs::write_file_atomic(staging / project.media_file, video.bytes);
    try {
      project.media = deps_.decoder->probe(staging / project.media_file);
    } catch (Error& e) {
      e.set_stage("probe");
      throw;
    }

    project.script = std::move(parsed.script);
    project.warnings = std::move(parsed.warnings);
    for (const auto& seg : project.script.segments) {
      if (seg.offset.to_seconds() > project.media.duration_s) {
        project.warnings.push_back({0, seg.index, "cue ends after the end of the video"});
      }
    }
    project.settings = settings;
    project.created_at = fs::utc_timestamp();
    project.id = store_.allocate_project_id();
    store_.commit_staging(staging, project);
    return project;
  } catch (...) {
    store_.discard_staging(staging);
    throw;
  }
}

Project Service::get_project(const std::string& project_id) const { return store_.load_project(project_id); }

std::vector<SegmentView> Service::list_segments(const std::string& project_id) const {
  const Project project = store_.load_project(project_id);
  std::vector<SegmentView> out;
  for (const auto& seg : project.script.segments) {
    SegmentView v{make_segment_id(project.id, seg.index), seg, {}};
    for (const auto& w : project.warnings) {
      if (w.segment_index == seg.index) {
        v.warnings.push_back(w.line ? "line " + std::to_string(w.line) + ": " + w.message : w.message);
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string Service::job_key(const TranslationJob& job) const {
  std::ostringstream key;
  key << job.segment_id << '|' << language_code(job.target) << '|' << modality_name(job.modality);
  if (job.modality == Modality::kTextPlusFrames) {
    key << '|' << (job.sampler.mode == SamplingMode::kFixedK ? "k" : "s") << '|' << job.sampler.k << '|'
        << job.sampler.stride_frames << '|' << job.buffer_s;
  }
  return key.str();
}

TranslationJob Service::translate_segment(const std::string& segment_id, const TranslateCommand& command) {
  const auto [project_id, index] = split_segment_id(segment_id);
  const Project project = store_.load_project(project_id);
  project.segment(index);
  if (command.target == project.script.language) {
    throw ValidationError("target language equals the source language");
  }

  TranslationJob job;
  job.project_id = project_id;
  job.segment_id = segment_id;
  job.segment_index = index;
  job.modality = command.modality;
  job.target = command.target;
  job.sampler = project.settings.sampler;
  job.buffer_s = command.frames.buffer_s.value_or(project.settings.buffer_s);
  if (command.frames.mode) job.sampler.mode = *command.frames.mode;
  if (command.frames.k) job.sampler.k = *command.frames.k;
  if (command.frames.stride_frames) job.sampler.stride_frames = *command.frames.stride_frames;
  job.sampler.validate();
  if (!(job.buffer_s >= 0.0)) throw ValidationError("buffer_s must be non-negative");

  std::lock_guard lock(mutex_);
  const auto key = job_key(job);
  if (auto it = active_.find(key); it != active_.end()) return jobs_.at(it->second);

  job.id = store_.allocate_job_id(job.seq);
  job.created_at = job.updated_at = fs::utc_timestamp();
  store_.save_job(job);
  jobs_[job.id] = job;
  active_[key] = job.id;
  queue_.push_back(job.id);
  changed_.notify_all();
  return job;
}

TranslationJob Service::get_job(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw NotFoundError("job " + job_id + " not found");
  return it->second;
}

TranslationJob Service::wait_job(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw NotFoundError("job " + job_id + " not found");
  changed_.wait_for(lock, timeout, [&] { return !jobs_.at(job_id).active(); });
  return jobs_.at(job_id);
}

std::vector<TranslationJob> Service::jobs_for_segment(const std::string& segment_id) const {
  std::lock_guard lock(mutex_);
  std::vector<TranslationJob> out;
  for (const auto& [id, job] : jobs_) {
    if (job.segment_id == segment_id) out.push_back(job);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
  return out;
}

void Service::worker_loop(std::stop_token stop) {
  while (true) {
    std::string job_id;
    {
      std::unique_lock lock(mutex_);
      if (!changed_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
      job_id = queue_.front();
      queue_.pop_front();
    }
    run_job(job_id);
  }
}

void Service::update_job(const std::string& job_id, const std::function<void(TranslationJob&)>& fn) {
  std::lock_guard lock(mutex_);
  auto& job = jobs_.at(job_id);
  fn(job);
  job.updated_at = fs::utc_timestamp();
  store_.save_job(job);
  if (!job.active()) active_.erase(job_key(job));
  changed_.notify_all();
}

void Service::run_job(const std::string& job_id) {
  update_job(job_id, [](TranslationJob& j) { j.advance(JobStatus::kRunning); });
  const TranslationJob job = get_job(job_id);

  std::string stage = "load";
  try {
    const Project project = store_.load_project(job.project_id);
    const AdSegment& segment = project.segment(job.segment_index);
    const Language source = project.script.language;
    const auto media = store_.media_path(project);

    TranslationRequest base;
    base.model_id = project.settings.model_id;
    base.segment = segment;

    // English text for grounding and, when needed, the pivot stage.
    std::string english = segment.clean_text;
    std::optional<TranslationResult> pivot;
    const bool frames_wanted = job.modality == Modality::kTextPlusFrames;
    if (source != Language::kEn && (job.target != Language::kEn || frames_wanted)) {
      stage = "pivot";
      TranslationRequest req = base;
      req.source = source;
      req.target = Language::kEn;
      pivot = translate(req, *deps_.provider, options_.translate);
      english = pivot->output_text;
    }
    update_job(job_id, [&](TranslationJob& j) { j.english_text = english; });

    std::optional<FrameSet> frames;
    if (frames_wanted) {
      stage = "grounding";
      const SearchWindow window = compute_window(segment, project.media.duration_s, job.buffer_s);
      const RetrievalResult retrieved = retrieve_moment(window, media.string(), english, *deps_.grounder);

      stage = "frames";
      const auto count = moment_frame_count(retrieved.moment, project.media.fps);
      const auto indices = plan_indices(count, job.sampler);
      frames = extract_frames(*deps_.decoder, media, project.media, retrieved.moment, indices, job.sampler);
      const auto dir = store_.job_frames_dir(job_id);
      stdfs::create_directories(dir);
      for (std::size_t i = 0; i < frames->images.size(); ++i) {
        fs::write_file_atomic(dir / frame_file(i), frames->images[i]);
      }
      update_job(job_id, [&](TranslationJob& j) {
        j.window = window;
        j.moment = retrieved.moment;
        j.grounding_fallback = retrieved.fallback_used || deps_.grounder->name() == "fallback";
        if (!retrieved.warning.empty()) j.warnings.push_back(retrieved.warning);
        j.frame_indices = frames->indices;
        j.frame_timestamps = frames->timestamps;
        for (const auto& w : frames->warnings) j.warnings.push_back(w);
      });
    }

    stage = "translate";
    TranslationRequest req = base;
    req.frames = frames;
    req.target = job.target;
    if (source == Language::kEn || job.target == Language::kEn) {
      req.source = source;
    } else {
      req.source = Language::kEn;
      req.segment.clean_text = english;
    }
    TranslationResult result = translate(req, *deps_.provider, options_.translate);
    if (pivot) {
      result.provider_meta["pivot_language"] = "en";
      result.provider_meta["pivot_input_tokens"] = std::to_string(pivot->input_tokens);
      result.provider_meta["pivot_output_tokens"] = std::to_string(pivot->output_tokens);
    }
    update_job(job_id, [&](TranslationJob& j) {
      j.result = std::move(result);
      j.advance(JobStatus::kDone);
    });
  } catch (const Error& e) {
    update_job(job_id, [&](TranslationJob& j) {
      j.error = JobError{e.code(), stage, e.what()};
      j.advance(JobStatus::kFailed);
    });
  } catch (const std::exception& e) {
    update_job(job_id, [&](TranslationJob& j) {
      j.error = JobError{"internal_error", stage, e.what()};
      j.advance(JobStatus::kFailed);
    });
  }
}

FramePreview Service::get_frames(const std::string& segment_id, const std::optional<std::string>& job_id) const {
  split_segment_id(segment_id);
  std::optional<TranslationJob> chosen;
  if (job_id) {
    chosen = get_job(*job_id);
    if (chosen->segment_id != segment_id) throw NotFoundError("job " + *job_id + " is not for " + segment_id);
  } else {
    for (const auto& job : jobs_for_segment(segment_id)) {
      if (job.modality == Modality::kTextPlusFrames && job.moment && !job.frame_indices.empty()) chosen = job;
    }
  }
  if (!chosen || chosen->modality != Modality::kTextPlusFrames || !chosen->moment || !chosen->window) {
    throw NotFoundError("no frames extracted for " + segment_id);
  }

  FramePreview preview;
  preview.job_id = chosen->id;
  preview.window = *chosen->window;
  preview.moment = *chosen->moment;
  preview.grounding_fallback = chosen->grounding_fallback;
  preview.indices = chosen->frame_indices;
  preview.timestamps = chosen->frame_timestamps;
  const auto dir = store_.job_frames_dir(chosen->id);
  for (std::size_t i = 0; i < preview.indices.size(); ++i) preview.images.push_back(fs::read_file(dir / frame_file(i)));
  return preview;
}

SqmRating Service::submit_rating(const std::string& segment_id, SqmRating rating,
                                 const std::optional<std::string>& job_id) {
  const auto [project_id, index] = split_segment_id(segment_id);
  rating.segment_id = segment_id;
  if (rating.rater_id.empty()) throw ValidationError("rater_id must not be empty");
  rating.validate();
  const Project project = store_.load_project(project_id);
  project.segment(index);
  if (job_id) {
    const auto job = get_job(*job_id);
    if (job.segment_id != segment_id) throw ValidationError("job " + *job_id + " is not for " + segment_id);
    rating.modality = job.modality;
  }
  store_.append_rating(project_id, rating);
  return rating;
}

std::vector<SqmRating> Service::ratings(const std::string& project_id) const {
  store_.load_project(project_id);
  return store_.load_ratings(project_id);
}

std::string Service::ratings_csv(const std::string& project_id) const { return ratings_to_csv(ratings(project_id)); }

void Service::post_edit(const std::string& segment_id, Language lang, const std::string& text) {
  const auto [project_id, index] = split_segment_id(segment_id);
  const Project project = store_.load_project(project_id);
  project.segment(index);
  if (cue_text(text).empty()) throw ValidationError("post-edit text is empty");
  store_.set_post_edit(project_id, Store::post_edit_key(segment_id, lang), text);
}

std::string Service::export_script(const std::string& project_id, Language target,
                                   std::optional<Modality> modality) const {
  const Project project = store_.load_project(project_id);
  const auto edits = store_.load_post_edits(project_id);

  std::map<std::string, const TranslationJob*> latest;
  std::lock_guard lock(mutex_);
  for (const auto& [id, job] : jobs_) {
    if (job.project_id != project_id || job.target != target || job.status != JobStatus::kDone) continue;
    if (modality && job.modality != *modality) continue;
    auto& slot = latest[job.segment_id];
    if (!slot || slot->seq < job.seq) slot = &job;
  }

  AdScript out;
  out.language = target;
  out.source_id = project.script.source_id;
  std::vector<std::string> missing;
  for (const auto& seg : project.script.segments) {
    const auto sid = make_segment_id(project_id, seg.index);
    std::string text;
    if (auto e = edits.find(Store::post_edit_key(sid, target)); e != edits.end()) {
      text = e->second;
    } else if (auto j = latest.find(sid); j != latest.end()) {
      text = j->second->result->output_text;
    } else {
      missing.push_back(sid);
      continue;
    }
    out.segments.push_back(make_segment(seg.index, seg.onset, seg.offset, cue_text(text)));
  }
  if (!missing.empty()) throw MissingTranslationsError(std::move(missing));
  return serialize_script(out);
}

Runtime::Runtime(ServiceConfig cfg) : config(std::move(cfg)) {
  config.validate();
  store = std::make_unique<Store>(config.store_root);
  audit = std::make_unique<AuditLog>(store->audit_path());

  if (config.provider == "openai") {
    if (config.openai.api_key.empty()) {
      throw ConfigError("provider 'openai' needs ADT_PROVIDER_API_KEY or OPENAI_API_KEY");
    }
    provider = std::make_unique<OpenAiChatProvider>(config.openai);
  } else {
    provider = std::make_unique<MockChatProvider>();
  }

  if (config.grounder_url.empty()) {
    grounder = std::make_unique<FallbackGroundingBackend>();
  } else {
    HttpGroundingConfig g = config.grounding;
    g.url = config.grounder_url;
    grounder = std::make_unique<HttpGroundingBackend>(g);
  }

  DecoderConfig d = config.decoder;
  if (d.cache_dir.empty()) d.cache_dir = store->frames_cache_dir();
  decoder = std::make_unique<FrameDecoder>(d);

  ServiceOptions options;
  options.workers = config.workers;
  options.max_upload_bytes = config.max_upload_bytes;
  options.translate.retry = config.retry;
  options.translate.audit = audit.get();
  if (!config.prompts_dir.empty()) options.translate.prompts = PromptSet::load(config.prompts_dir);
  service = std::make_unique<Service>(*store, ServiceDeps{provider.get(), grounder.get(), decoder.get()}, options);
}

Runtime::~Runtime() {
  if (service) service->shutdown();
}

}  // namespace adt
