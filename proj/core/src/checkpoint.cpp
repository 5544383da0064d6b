#include "ctm/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <memory>

#include "json.hpp"

#include "ctm/errors.hpp"

namespace ctm {

using nlohmann::json;

std::vector<std::uint8_t> encode_checkpoint(const CtmModel<float>& model) {
  TensorArchive archive;
  for (const auto& [name, t] : model.parameters()) {
    archive.tensors.push_back({name, t.shape(), std::vector<float>(t.data().begin(), t.data().end())});
  }
  json tail;
  tail["config"] = json::parse(model.config().to_json());
  tail["vocab"] = model.vocab() ? json(model.vocab()->tokens()) : json::array();
  archive.json = tail.dump();
  return encode_archive(archive);
}

CtmModel<float> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  const TensorArchive archive = decode_archive(bytes);
  json tail;
  try {
    tail = json::parse(archive.json);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint JSON tail is malformed: ") + e.what());
  }
  if (!tail.contains("config") || !tail.contains("vocab")) {
    throw FormatError("checkpoint JSON tail lacks config or vocab");
  }
  const CtmConfig config = CtmConfig::from_json(tail["config"].dump());
  RngState unused(0);
  auto model = [&]() {
    if (config.embeddings.empty()) {
      return CtmModel<float>(config, Vocab::from_tokens(tail["vocab"].get<std::vector<std::string>>()),
                             unused);
    }
    auto enc = std::make_shared<PrecomputedEncoder<float>>(
        PrecomputedEncoder<float>::load(config.embeddings, config.hidden_dim));
    return CtmModel<float>(config, enc, unused);
  }();
  const auto params = model.parameters();
  if (params.size() != archive.tensors.size()) {
    throw FormatError("checkpoint holds " + std::to_string(archive.tensors.size()) +
                      " tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& rec = archive.tensors[i];
    auto t = params[i].tensor;
    if (rec.name != params[i].name || rec.shape != t.shape()) {
      throw FormatError("checkpoint tensor " + std::to_string(i) + " is '" + rec.name + "' " +
                        to_string(rec.shape) + ", expected '" + params[i].name + "' " +
                        to_string(t.shape()));
    }
    std::copy(rec.data.begin(), rec.data.end(), t.mutable_data().begin());
  }
  return model;
}

void save_checkpoint(const std::filesystem::path& path, const CtmModel<float>& model) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed for " + path.string());
}

CtmModel<float> load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file_bytes(path));
}

void require_compatible(const CtmConfig& checkpoint, const CtmConfig& requested) {
  const auto diff = checkpoint.architecture_mismatches(requested);
  if (diff.empty()) return;
  std::string fields;
  for (const auto& f : diff) fields += (fields.empty() ? "" : ", ") + f;
  throw ConfigError("checkpoint is incompatible with the requested config: " + fields);
}

std::uint64_t parameter_digest(const CtmModel<float>& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, t] : model.parameters()) {
    for (float f : t.data()) {
      const auto bits = std::bit_cast<std::uint32_t>(f);
      for (int i = 0; i < 4; ++i) {
        h ^= (bits >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

}  // namespace ctm
