#include "ctm/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ctm/errors.hpp"

namespace ctm {

namespace {

constexpr char kMagic[4] = {'C', 'T', 'M', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("truncated archive at offset " + std::to_string(pos_) + " reading " + what);
    }
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }

  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const TensorRecord* TensorArchive::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

std::vector<std::uint8_t> encode_archive(const TensorArchive& archive) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, archive.version);
  put_u32(out, static_cast<std::uint32_t>(archive.tensors.size()));
  for (const auto& t : archive.tensors) {
    if (t.data.size() != numel(t.shape)) {
      throw ContractError("archive tensor '" + t.name + "' data does not match its shape");
    }
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (float f : t.data) put_f32(out, f);
  }
  put_u32(out, static_cast<std::uint32_t>(archive.json.size()));
  out.insert(out.end(), archive.json.begin(), archive.json.end());
  return out;
}

TensorArchive decode_archive(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic at offset 0");
  in.str(4, "magic");
  TensorArchive archive;
  const std::size_t version_at = in.offset();
  archive.version = in.u32("version");
  if (archive.version != TensorArchive::kVersion) {
    throw FormatError("unsupported version " + std::to_string(archive.version) + " at offset " +
                      std::to_string(version_at));
  }
  const std::uint32_t count = in.u32("tensor count");
  for (std::uint32_t k = 0; k < count; ++k) {
    TensorRecord t;
    const std::uint32_t name_len = in.u32("name length");
    t.name = in.str(name_len, "name");
    const std::uint32_t rank = in.u32("rank");
    if (rank > 8) {
      throw FormatError("implausible rank " + std::to_string(rank) + " at offset " +
                        std::to_string(in.offset() - 4));
    }
    std::size_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      const std::uint32_t d = in.u32("dimension");
      if (d == 0) throw FormatError("zero dimension at offset " + std::to_string(in.offset() - 4));
      t.shape.push_back(d);
      n *= d;
    }
    in.need(n * 4, "tensor data");
    t.data.resize(n);
    for (auto& f : t.data) f = in.f32("tensor data");
    archive.tensors.push_back(std::move(t));
  }
  const std::uint32_t json_len = in.u32("json length");
  archive.json = in.str(json_len, "json");
  if (!in.done()) throw FormatError("trailing bytes at offset " + std::to_string(in.offset()));
  return archive;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void write_archive(const std::filesystem::path& path, const TensorArchive& archive) {
  const auto bytes = encode_archive(archive);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed for " + path.string());
}

TensorArchive read_archive(const std::filesystem::path& path) {
  return decode_archive(read_file_bytes(path));
}

}  // namespace ctm
