#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include "adt/frames.hpp"
#include "adt/fs.hpp"

namespace adt::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(ADT_FIXTURES_DIR) / name; }

inline DecoderConfig stub_decoder_config(const std::filesystem::path& cache_dir) {
  DecoderConfig c;
  c.probe_command = std::string(ADT_STUB_DECODER) + " probe {input}";
  c.extract_command = std::string(ADT_STUB_DECODER) + " extract {input} {time} {output} {width} {height} {quality}";
  c.cache_dir = cache_dir;
  return c;
}

// Removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adt-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace adt::testing
