#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

namespace testsupport {

/// Writes `content` to a unique file under the system temp directory and
/// removes it on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& content, const std::string& suffix = ".csv") {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lht_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)) + suffix);
    std::ofstream file(path_, std::ios::binary);
    file << content;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Directory with the benchmark CSVs; overridable for out-of-tree data.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("LHT_DATA_DIR")) return env;
#ifdef LHT_DATA_DIR_DEFAULT
  return LHT_DATA_DIR_DEFAULT;
#else
  return "data";
#endif
}

inline bool dataset_available(const std::string& name) {
  return std::filesystem::exists(data_dir() / name);
}

}  // namespace testsupport
