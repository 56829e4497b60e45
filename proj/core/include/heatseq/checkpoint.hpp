#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "heatseq/model.hpp"

namespace heatseq {

// Binary layout, all integers and floats little-endian:
//   "HSEQ1"                       5 bytes
//   schema version                u32
//   variant                       u8   (0 = lstm, 1 = lstm-am)
//   layers, hidden, input dim,
//   attention dim                 4 x u32 (attention dim is 0 for lstm)
//   dropout                       f64
//   rng algorithm id              u32
//   training seed                 u64
//   payload                       every tensor of ModelParams::for_each_tensor, row-major f64
//   checksum                      u64 FNV-1a over the payload bytes
inline constexpr char kCheckpointMagic[] = "HSEQ1";
inline constexpr std::uint32_t kCheckpointSchemaVersion = 1;

struct Checkpoint {
  ModelParams params;
  std::uint32_t schema_version = kCheckpointSchemaVersion;
  std::uint32_t rng_algorithm = 0;
  std::uint64_t training_seed = 0;
};

std::vector<std::uint8_t> encode_checkpoint(const ModelParams& params, std::uint64_t training_seed);
/// Throws CheckpointError on a bad magic, unknown version, truncation or checksum mismatch.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, std::uint64_t training_seed);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace heatseq
