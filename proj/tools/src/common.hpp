#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <heatseq/manifest.hpp>

namespace heatseq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Bad flag values discovered after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir = ".";
};

std::filesystem::path output_dir(const GlobalOptions& g, const std::string& override_dir = {});
std::ifstream open_input(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::function<void(std::ostream&)>& body);

std::string now_iso8601();

RunManifest begin_manifest(const std::string& command, const std::vector<std::string>& argv, const GlobalOptions& g);
/// Stamps the finish time and writes `manifest_<command>.txt` into `dir`.
std::filesystem::path finish_manifest(RunManifest& m, const std::filesystem::path& dir);

/// Split file next to `instances` when no explicit path is given; empty if absent.
std::filesystem::path default_split_path(const std::filesystem::path& instances, const std::string& explicit_path);

}  // namespace heatseq::cli
