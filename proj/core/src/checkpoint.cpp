#include "heatseq/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "heatseq/errors.hpp"
#include "heatseq/rng.hpp"

namespace heatseq {

namespace {

constexpr std::size_t kMagicLen = 5;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::size_t size() const { return out_.size(); }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > in_.size()) throw CheckpointError("checkpoint is truncated");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    auto s = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(s[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto s = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(s[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> encode_checkpoint(const ModelParams& params, std::uint64_t training_seed) {
  params.check_shapes();
  const ModelConfig& c = params.config;
  Writer w;
  w.bytes(kCheckpointMagic, kMagicLen);
  w.u32(kCheckpointSchemaVersion);
  w.u8(c.variant == Variant::Lstm ? 0 : 1);
  w.u32(static_cast<std::uint32_t>(c.layers));
  w.u32(static_cast<std::uint32_t>(c.hidden));
  w.u32(static_cast<std::uint32_t>(c.input_dim));
  w.u32(static_cast<std::uint32_t>(params.attention ? c.resolved_attention_dim() : 0));
  w.f64(c.dropout);
  w.u32(Rng::kAlgorithmId);
  w.u64(training_seed);
  const std::size_t payload_start = w.size();
  params.for_each_tensor([&](const std::string&, std::span<const double> v) {
    for (double x : v) w.f64(x);
  });
  const auto& buf = w.buffer();
  const std::uint64_t sum = fnv1a64(std::span(buf).subspan(payload_start));
  w.u64(sum);
  return std::move(w.buffer());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(kMagicLen);
  if (std::memcmp(magic.data(), kCheckpointMagic, kMagicLen) != 0) throw CheckpointError("not a heatseq checkpoint");
  Checkpoint ck;
  ck.schema_version = r.u32();
  if (ck.schema_version != kCheckpointSchemaVersion) {
    throw CheckpointError("unsupported checkpoint schema version " + std::to_string(ck.schema_version));
  }
  const std::uint8_t variant = r.u8();
  if (variant > 1) throw CheckpointError("unknown model variant id " + std::to_string(variant));
  ModelConfig cfg;
  cfg.variant = variant == 0 ? Variant::Lstm : Variant::LstmAttention;
  cfg.layers = r.u32();
  cfg.hidden = r.u32();
  cfg.input_dim = r.u32();
  cfg.attention_dim = r.u32();
  cfg.dropout = r.f64();
  ck.rng_algorithm = r.u32();
  ck.training_seed = r.u64();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw CheckpointError(std::string("invalid checkpoint header: ") + e.what());
  }

  // Shapes come from a zero-initialised model of the declared configuration.
  Rng scratch(0);
  ModelParams params = init_params(cfg, scratch).zeros_like();
  const std::size_t payload_start = r.pos();
  const std::size_t expected = params.parameter_count() * 8;
  if (r.remaining() != expected + 8) {
    throw CheckpointError("checkpoint payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                          std::to_string(expected + 8));
  }
  params.for_each_tensor([&](const std::string&, std::span<double> v) {
    for (double& x : v) x = r.f64();
  });
  const std::uint64_t stored = r.u64();
  if (stored != fnv1a64(bytes.subspan(payload_start, expected))) throw CheckpointError("checkpoint checksum mismatch");
  ck.params = std::move(params);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, std::uint64_t training_seed) {
  const auto bytes = encode_checkpoint(params, training_seed);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace heatseq
