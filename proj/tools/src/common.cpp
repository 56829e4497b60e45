#include "common.hpp"

#include <chrono>

#include <heatseq/errors.hpp>
#include <heatseq/signal.hpp>

#ifndef HEATSEQ_VERSION
#define HEATSEQ_VERSION "unknown"
#endif

namespace heatseq::cli {

namespace fs = std::filesystem;

fs::path output_dir(const GlobalOptions& g, const std::string& override_dir) {
  fs::path dir = override_dir.empty() ? fs::path(g.out_dir) : fs::path(override_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("output directory '" + dir.string() + "' is not writable");
  return dir;
}

std::ifstream open_input(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  return in;
}

void write_file(const fs::path& p, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  body(out);
  out.flush();
  if (!out) throw Error("failed writing " + p.string());
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  return format_iso8601(std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

RunManifest begin_manifest(const std::string& command, const std::vector<std::string>& argv, const GlobalOptions& g) {
  RunManifest m;
  m.tool_version = HEATSEQ_VERSION;
  m.command = command;
  m.argv = argv;
  m.started = now_iso8601();
  m.set("seed", std::to_string(g.seed));
  m.set("threads", std::to_string(g.threads));
  m.set("out_dir", g.out_dir);
  return m;
}

fs::path finish_manifest(RunManifest& m, const fs::path& dir) {
  m.finished = now_iso8601();
  const fs::path p = dir / ("manifest_" + m.command + ".txt");
  write_file(p, [&](std::ostream& out) { write_manifest(out, m); });
  return p;
}

fs::path default_split_path(const fs::path& instances, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  const fs::path sibling = instances.parent_path() / "split.csv";
  return fs::exists(sibling) ? sibling : fs::path{};
}

}  // namespace heatseq::cli
