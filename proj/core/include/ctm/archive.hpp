#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ctm/tensor.hpp"

namespace ctm {

// Binary container shared by checkpoints and precomputed embeddings:
//
//   "CTM1"  u32 version  u32 count
//   count x { u32 name_len, name bytes, u32 rank, rank x u32 dim, f32 data }
//   u32 json_len, json bytes
//
// All integers and floats little-endian.
struct TensorRecord {
  std::string name;
  Shape shape;
  std::vector<float> data;
};

struct TensorArchive {
  static constexpr std::uint32_t kVersion = 1;

  std::uint32_t version = kVersion;
  std::vector<TensorRecord> tensors;
  std::string json;

  const TensorRecord* find(const std::string& name) const;
};

std::vector<std::uint8_t> encode_archive(const TensorArchive& archive);
/// Throws FormatError naming the byte offset on bad magic, unsupported
/// version, inconsistent sizes or truncation.
TensorArchive decode_archive(std::span<const std::uint8_t> bytes);

void write_archive(const std::filesystem::path& path, const TensorArchive& archive);
TensorArchive read_archive(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace ctm
