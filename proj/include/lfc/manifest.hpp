#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace lfc {

/// FNV-1a 64-bit content digest (integrity listing, not cryptographic).
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::string& path);
std::string digest_hex(std::uint64_t digest);

/// Collects artifact paths during a run and writes <out>/manifest.json with
/// a digest per artifact. Wall-clock metadata goes to a separate file so
/// manifests from identical runs compare byte-equal.
class ManifestWriter {
 public:
  explicit ManifestWriter(std::string out_dir);

  void record(const std::string& relative_path);
  void set_config(const nlohmann::json& config);
  void set_seed(std::uint64_t seed);
  void set_subcommand(const std::string& name);

  /// Writes manifest.json (deterministic) and run_info.json (timestamped).
  void write();

 private:
  std::string out_dir_;
  std::string subcommand_;
  nlohmann::json config_ = nlohmann::json::object();
  std::uint64_t seed_ = 0;
  std::vector<std::string> artifacts_;
};

}  // namespace lfc
