#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lur::nn {

// Parameter checkpoint container.
//
// On-disk layout (all integers and floats little-endian):
//   bytes 0..7   magic "LURCKPT1"
//   u32          format version (1)
//   u32          meta count, then per entry: u32 key length, key bytes,
//                i64 value
//   u32          tensor count, then per entry: u32 name length, name bytes,
//                u32 ndim, i32 dims[ndim]
//   payload      float32 arrays back to back, manifest order
struct CheckpointEntry {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

struct Checkpoint {
  std::uint32_t version = 1;
  std::map<std::string, std::int64_t> meta;
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry* find(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lur::nn
