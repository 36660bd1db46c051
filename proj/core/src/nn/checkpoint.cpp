#include "lurbench/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <memory>

#include "lurbench/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

namespace lur::nn {

namespace {

constexpr char kMagic[8] = {'L', 'U', 'R', 'C', 'K', 'P', 'T', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
void write_pod(std::FILE* f, const T& v) {
  if (std::fwrite(&v, sizeof(T), 1, f) != 1)
    throw lur::DataError("checkpoint write failed");
}

template <typename T>
T read_pod(std::FILE* f) {
  T v{};
  if (std::fread(&v, sizeof(T), 1, f) != 1)
    throw lur::DataError("checkpoint truncated");
  return v;
}

void write_string(std::FILE* f, const std::string& s) {
  write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(s.size()));
  if (!s.empty() && std::fwrite(s.data(), 1, s.size(), f) != s.size())
    throw lur::DataError("checkpoint write failed");
}

std::string read_string(std::FILE* f) {
  const auto len = read_pod<std::uint32_t>(f);
  if (len > (1u << 20)) throw lur::DataError("checkpoint: bad string length");
  std::string s(len, '\0');
  if (len && std::fread(s.data(), 1, len, f) != len)
    throw lur::DataError("checkpoint truncated");
  return s;
}

}  // namespace

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw lur::DataError("cannot open for writing: " + path);
  if (std::fwrite(kMagic, 1, 8, f.get()) != 8)
    throw lur::DataError("checkpoint write failed");
  write_pod<std::uint32_t>(f.get(), ckpt.version);
  write_pod<std::uint32_t>(f.get(),
                           static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    write_string(f.get(), k);
    write_pod<std::int64_t>(f.get(), v);
  }
  write_pod<std::uint32_t>(f.get(),
                           static_cast<std::uint32_t>(ckpt.entries.size()));
  for (const auto& e : ckpt.entries) {
    write_string(f.get(), e.name);
    write_pod<std::uint32_t>(f.get(),
                             static_cast<std::uint32_t>(e.shape.size()));
    for (int d : e.shape) write_pod<std::int32_t>(f.get(), d);
  }
  for (const auto& e : ckpt.entries) {
    size_t n = 1;
    for (int d : e.shape) n *= static_cast<size_t>(d);
    if (n != e.data.size())
      throw lur::ShapeError("checkpoint entry size mismatch: " + e.name);
    if (n && std::fwrite(e.data.data(), sizeof(float), n, f.get()) != n)
      throw lur::DataError("checkpoint write failed");
  }
  if (std::fflush(f.get()) != 0)
    throw lur::DataError("checkpoint flush failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw lur::DataError("cannot open checkpoint: " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 ||
      std::memcmp(magic, kMagic, 8) != 0) {
    throw lur::DataError("not a checkpoint file: " + path);
  }
  Checkpoint ckpt;
  ckpt.version = read_pod<std::uint32_t>(f.get());
  if (ckpt.version != 1)
    throw lur::DataError("unsupported checkpoint version");
  const auto n_meta = read_pod<std::uint32_t>(f.get());
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = read_string(f.get());
    ckpt.meta[k] = read_pod<std::int64_t>(f.get());
  }
  const auto n_entries = read_pod<std::uint32_t>(f.get());
  ckpt.entries.resize(n_entries);
  for (auto& e : ckpt.entries) {
    e.name = read_string(f.get());
    const auto ndim = read_pod<std::uint32_t>(f.get());
    if (ndim > 8) throw lur::DataError("checkpoint: bad tensor rank");
    e.shape.resize(ndim);
    for (auto& d : e.shape) d = read_pod<std::int32_t>(f.get());
  }
  for (auto& e : ckpt.entries) {
    size_t n = 1;
    for (int d : e.shape) {
      if (d <= 0) throw lur::DataError("checkpoint: bad tensor extent");
      n *= static_cast<size_t>(d);
    }
    e.data.resize(n);
    if (n && std::fread(e.data.data(), sizeof(float), n, f.get()) != n)
      throw lur::DataError("checkpoint truncated");
  }
  return ckpt;
}

}  // namespace lur::nn
