#include "adt/frames.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "adt/process.hpp"
#include "adt/text.hpp"

namespace adt {

void SamplerConfig::validate() const {
  if (mode == SamplingMode::kFixedK && k < 1) throw InputError("frame count k must be >= 1");
  if (mode == SamplingMode::kStride && stride_frames < 1) throw InputError("frame stride must be >= 1");
  if (target_width < 1 || target_height < 1) throw InputError("frame size must be positive");
}

std::vector<std::int64_t> plan_indices(std::int64_t n, const SamplerConfig& config) {
  if (n < 1) throw InputError("moment must cover at least one frame");
  config.validate();
  std::vector<std::int64_t> out;
  if (config.mode == SamplingMode::kStride) {
    for (std::int64_t i = 0; i < n; i += config.stride_frames) out.push_back(i);
    return out;
  }
  if (config.k == 1) {
    out.push_back(std::llround(static_cast<double>(n - 1) / 2.0));
    return out;
  }
  const std::int64_t k = config.k;
  for (std::int64_t i = 0; i < k; ++i) {
    // Exact rational rounding of i*(N-1)/(k-1), halves away from zero.
    const std::int64_t num = i * (n - 1);
    const std::int64_t idx = (2 * num + (k - 1)) / (2 * (k - 1));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

std::int64_t moment_frame_count(const MomentCandidate& moment, double fps) {
  if (!(fps > 0.0)) throw InputError("fps must be positive");
  const double frames = std::max(0.0, moment.duration()) * fps;
  return static_cast<std::int64_t>(std::floor(frames + 1e-9)) + 1;
}

MediaInfo parse_probe_output(const std::string& out) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : out) {
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
      if (!cur.empty()) fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) fields.push_back(std::move(cur));
  if (fields.size() < 2) throw MediaError("cannot parse probe output '" + out + "'");
  MediaInfo info;
  try {
    const auto slash = fields[0].find('/');
    if (slash != std::string::npos) {
      const double num = std::stod(fields[0].substr(0, slash));
      const double den = std::stod(fields[0].substr(slash + 1));
      info.fps = den > 0 ? num / den : 0.0;
    } else {
      info.fps = std::stod(fields[0]);
    }
    info.duration_s = std::stod(fields[1]);
  } catch (const std::exception&) {
    throw MediaError("cannot parse probe output '" + out + "'");
  }
  if (!(info.fps > 0.0) || !(info.duration_s > 0.0)) {
    throw MediaError("probe reported non-positive fps or duration: '" + out + "'");
  }
  return info;
}

FrameDecoder::FrameDecoder(DecoderConfig config) : config_(std::move(config)) {
  if (config_.cache_dir.empty()) {
    char tmpl[] = "/tmp/adt-frames-XXXXXX";
    const char* dir = ::mkdtemp(tmpl);
    if (dir == nullptr) throw Error("io_error", "cannot create frame cache directory");
    config_.cache_dir = dir;
  }
  std::filesystem::create_directories(config_.cache_dir);
}

MediaInfo FrameDecoder::probe(const std::filesystem::path& media) const {
  if (!std::filesystem::exists(media)) throw MediaError("media file not found: " + media.string());
  const auto argv = expand_command(config_.probe_command, {{"input", media.string()}});
  const auto res = run_command(argv);
  if (res.exit_code != 0) {
    throw MediaError("probe failed for '" + media.string() + "': " + std::string(text::trim(res.err)));
  }
  return parse_probe_output(res.out);
}

std::string FrameDecoder::media_hash(const std::filesystem::path& media) {
  struct stat st {};
  if (::stat(media.c_str(), &st) != 0) throw MediaError("media file not found: " + media.string());
  const std::string key = std::filesystem::absolute(media).string() + "|" + std::to_string(st.st_size) + "|" +
                          std::to_string(st.st_mtim.tv_sec) + "." + std::to_string(st.st_mtim.tv_nsec);
  return text::sha256_hex(key).substr(0, 24);
}

std::shared_ptr<std::mutex> FrameDecoder::lock_for(const std::filesystem::path& media) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[std::filesystem::absolute(media).string()];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

std::string FrameDecoder::extract(const std::filesystem::path& media, double time_s, int width, int height) {
  char ts[32];
  std::snprintf(ts, sizeof(ts), "%.3f", time_s);
  const std::string name = media_hash(media) + "_" + std::to_string(std::llround(time_s * 1000.0)) + "ms_" +
                           std::to_string(width) + "x" + std::to_string(height) + ".jpg";
  const auto cached = config_.cache_dir / name;

  auto lock = lock_for(media);
  std::lock_guard guard(*lock);
  if (std::filesystem::exists(cached)) return fs::read_file(cached);

  const auto partial = config_.cache_dir / (name + ".part.jpg");
  const auto argv = expand_command(config_.extract_command, {{"input", media.string()},
                                                             {"time", ts},
                                                             {"output", partial.string()},
                                                             {"width", std::to_string(width)},
                                                             {"height", std::to_string(height)},
                                                             {"quality", std::to_string(config_.quality)}});
  const auto res = run_command(argv);
  if (res.exit_code != 0 || !std::filesystem::exists(partial)) {
    std::filesystem::remove(partial);
    throw MediaError("frame decode failed at t=" + std::string(ts) + "s in '" + media.string() +
                     "': " + std::string(text::trim(res.err)));
  }
  std::filesystem::rename(partial, cached);
  return fs::read_file(cached);
}

FrameSet extract_frames(FrameDecoder& decoder, const std::filesystem::path& media, const MediaInfo& info,
                        const MomentCandidate& moment, const std::vector<std::int64_t>& indices,
                        const SamplerConfig& config) {
  config.validate();
  if (!(info.fps > 0.0)) throw InputError("fps must be positive");
  const std::int64_t n = moment_frame_count(moment, info.fps);
  FrameSet set;
  set.moment = moment;
  set.fps = info.fps;
  const double last_frame_t = std::max(0.0, info.duration_s - 1.0 / info.fps);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::int64_t idx = indices[i];
    if (idx < 0 || idx >= n || (i > 0 && idx <= indices[i - 1])) {
      throw InputError("frame indices must be strictly increasing within [0, " + std::to_string(n) + ")");
    }
    double t = moment.start_s + static_cast<double>(idx) / info.fps;
    if (t > last_frame_t + 1e-9) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "frame %lld at %.3fs is past the stream end; clamped to %.3fs",
                    static_cast<long long>(idx), t, last_frame_t);
      set.warnings.emplace_back(buf);
      t = last_frame_t;
    }
    set.indices.push_back(idx);
    set.timestamps.push_back(t);
    set.images.push_back(decoder.extract(media, t, config.target_width, config.target_height));
  }
  return set;
}

}  // namespace adt
