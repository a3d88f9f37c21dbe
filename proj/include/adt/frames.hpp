#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "adt/grounding.hpp"

namespace adt {

enum class SamplingMode { kFixedK, kStride };

struct SamplerConfig {
  SamplingMode mode = SamplingMode::kFixedK;
  int k = 4;
  int stride_frames = 50;
  int target_width = 960;
  int target_height = 540;

  // Throws InputError when k / stride / size are not positive.
  void validate() const;
};

// Frame indices relative to the moment start.
//   fixed_k, k > 1: round(i*(N-1)/(k-1)) for i in [0, k), duplicates removed;
//   fixed_k, k = 1: round((N-1)/2);
//   stride: 0, s, 2s, ... < N.
// Throws InputError for N < 1.
std::vector<std::int64_t> plan_indices(std::int64_t moment_frame_count, const SamplerConfig& config);

// Frames covered by the moment: floor(duration * fps) + 1.
std::int64_t moment_frame_count(const MomentCandidate& moment, double fps);

struct MediaInfo {
  double fps = 0.0;
  double duration_s = 0.0;
};

// Parses probe output: fps as "num/den" or a decimal, then duration, separated
// by commas or whitespace.
MediaInfo parse_probe_output(const std::string& out);

struct DecoderConfig {
  // Placeholders: {input}
  std::string probe_command =
      "ffprobe -v error -select_streams v:0 -show_entries stream=r_frame_rate:format=duration -of csv=p=0 {input}";
  // Placeholders: {input} {time} {output} {width} {height} {quality}
  std::string extract_command =
      "ffmpeg -v error -y -ss {time} -i {input} -frames:v 1 -vf scale={width}:{height} -q:v {quality} {output}";
  // JPEG quality scale passed to the decoder (ffmpeg -q:v, 2 = best).
  int quality = 3;
  std::filesystem::path cache_dir;  // empty: a fresh temp directory
};

// External decoder behind command templates. Extraction from one media file is
// serialized; different files extract concurrently. Extracted frames are
// cached by (media hash, timestamp, size).
class FrameDecoder {
 public:
  explicit FrameDecoder(DecoderConfig config);

  MediaInfo probe(const std::filesystem::path& media) const;
  // Encoded image bytes for the frame at `time_s`. Throws MediaError naming the
  // timestamp on failure.
  std::string extract(const std::filesystem::path& media, double time_s, int width, int height);

  const DecoderConfig& config() const { return config_; }

 private:
  std::shared_ptr<std::mutex> lock_for(const std::filesystem::path& media);
  static std::string media_hash(const std::filesystem::path& media);

  DecoderConfig config_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

struct FrameSet {
  MomentCandidate moment;
  double fps = 0.0;
  std::vector<std::int64_t> indices;
  std::vector<double> timestamps;
  std::vector<std::string> images;
  std::vector<std::string> warnings;
};

// Decodes the planned frames at moment.start_s + index / fps. Timestamps past
// the end of the stream are clamped to the last frame with a warning.
FrameSet extract_frames(FrameDecoder& decoder, const std::filesystem::path& media, const MediaInfo& info,
                        const MomentCandidate& moment, const std::vector<std::int64_t>& indices,
                        const SamplerConfig& config);

}  // namespace adt
