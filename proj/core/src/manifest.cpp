#include "heatseq/manifest.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <openssl/evp.h>

#include "heatseq/errors.hpp"

namespace heatseq {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256: init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_, data, n) != 1) throw Error("sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md, &len) != 1) throw Error("sha256: final failed");
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 0xf];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : config) {
    if (k == key) {
      v = value;
      return;
    }
  }
  config.emplace_back(key, value);
}

void RunManifest::add_input(const std::filesystem::path& p) { inputs.push_back({p.string(), sha256_file(p)}); }
void RunManifest::add_output(const std::filesystem::path& p) { outputs.push_back({p.string(), sha256_file(p)}); }

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "heatseq-manifest " << RunManifest::kVersion << '\n';
  out << "tool_version " << m.tool_version << '\n';
  out << "command " << m.command << '\n';
  out << "argv ";
  for (std::size_t i = 0; i < m.argv.size(); ++i) out << (i ? "\t" : "") << m.argv[i];
  out << '\n';
  for (const auto& [k, v] : m.config) out << "config " << k << '=' << v << '\n';
  for (const auto& f : m.inputs) out << "input " << f.sha256 << ' ' << f.path << '\n';
  for (const auto& f : m.outputs) out << "output " << f.sha256 << ' ' << f.path << '\n';
  out << "started " << m.started << '\n';
  out << "finished " << m.finished << '\n';
}

RunManifest read_manifest(std::istream& in) {
  RunManifest m;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line.rfind("heatseq-manifest ", 0) != 0) throw ParseError(1, "not a heatseq manifest");
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "tool_version") {
      m.tool_version = rest;
    } else if (key == "command") {
      m.command = rest;
    } else if (key == "argv") {
      std::size_t start = 0;
      while (start <= rest.size()) {
        const auto tab = rest.find('\t', start);
        m.argv.push_back(rest.substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
    } else if (key == "config") {
      const auto eq = rest.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "config entry without '='");
      m.config.emplace_back(rest.substr(0, eq), rest.substr(eq + 1));
    } else if (key == "input" || key == "output") {
      const auto sp2 = rest.find(' ');
      if (sp2 == std::string::npos) throw ParseError(line_no, "file entry needs a hash and a path");
      FileRecord f{rest.substr(sp2 + 1), rest.substr(0, sp2)};
      (key == "input" ? m.inputs : m.outputs).push_back(std::move(f));
    } else if (key == "started") {
      m.started = rest;
    } else if (key == "finished") {
      m.finished = rest;
    } else {
      throw ParseError(line_no, "unknown manifest key '" + key + "'");
    }
  }
  return m;
}

}  // namespace heatseq
