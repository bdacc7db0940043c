#include "lfc/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lfc {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("digest: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const auto n = static_cast<std::size_t>(is.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string digest_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

ManifestWriter::ManifestWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {
  std::filesystem::create_directories(out_dir_);
}

void ManifestWriter::record(const std::string& relative_path) {
  artifacts_.push_back(relative_path);
}

void ManifestWriter::set_config(const nlohmann::json& config) {
  config_ = config;
  // the destination directory is not part of the run's identity
  config_.erase("out");
}
void ManifestWriter::set_seed(std::uint64_t seed) { seed_ = seed; }
void ManifestWriter::set_subcommand(const std::string& name) { subcommand_ = name; }

void ManifestWriter::write() {
  nlohmann::json manifest;
  manifest["subcommand"] = subcommand_;
  manifest["seed"] = seed_;
  const std::string config_text = config_.dump();
  manifest["config_digest"] = digest_hex(fnv1a64(config_text.data(), config_text.size()));
  manifest["config"] = config_;

  nlohmann::json artifacts = nlohmann::json::array();
  std::sort(artifacts_.begin(), artifacts_.end());
  for (const auto& rel : artifacts_) {
    const auto path = std::filesystem::path(out_dir_) / rel;
    artifacts.push_back({{"path", rel}, {"fnv1a64", digest_hex(fnv1a64_file(path.string()))}});
  }
  manifest["artifacts"] = std::move(artifacts);

  std::ofstream os(std::filesystem::path(out_dir_) / "manifest.json", std::ios::binary);
  if (!os) throw std::runtime_error("cannot write manifest under " + out_dir_);
  os << manifest.dump(2) << '\n';

  // timestamps live apart from the reproducible manifest
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  nlohmann::json info;
  info["unix_time_s"] =
      std::chrono::duration_cast<std::chrono::seconds>(now).count();
  std::ofstream info_os(std::filesystem::path(out_dir_) / "run_info.json", std::ios::binary);
  info_os << info.dump(2) << '\n';
}

}  // namespace lfc
