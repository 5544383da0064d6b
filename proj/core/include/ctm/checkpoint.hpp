#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ctm/archive.hpp"
#include "ctm/model.hpp"

namespace ctm {

// A checkpoint is an archive whose tensors are the model parameters (in
// CtmModel::parameters() order) and whose JSON tail is
// {"config": {...}, "vocab": [...]}.
std::vector<std::uint8_t> encode_checkpoint(const CtmModel<float>& model);
CtmModel<float> decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const CtmModel<float>& model);
CtmModel<float> load_checkpoint(const std::filesystem::path& path);

/// ConfigError naming every architecture field that differs.
void require_compatible(const CtmConfig& checkpoint, const CtmConfig& requested);

/// FNV-1a over every parameter's bytes, in parameter order.
std::uint64_t parameter_digest(const CtmModel<float>& model);

}  // namespace ctm
