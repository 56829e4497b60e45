#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace heatseq {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

struct FileRecord {
  std::string path;
  std::string sha256;
};

/// What a command did: its argument vector, resolved configuration, seeds and the
/// content hash of every file it read or wrote.
struct RunManifest {
  static constexpr int kVersion = 1;

  std::string tool_version;
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::string started;
  std::string finished;

  void set(const std::string& key, const std::string& value);
  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);
};

// Line-oriented `key value` text; argv entries are tab separated.
void write_manifest(std::ostream& out, const RunManifest& m);
RunManifest read_manifest(std::istream& in);

}  // namespace heatseq
