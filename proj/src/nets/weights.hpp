#pragma once

#include <string>

#include "nets/module_net.hpp"

namespace pgr::nets {

struct WeightsMeta {
  std::uint64_t seed = 0;
  std::uint32_t epochs = 0;
  std::string dataset_hash;
};

// Binary container: magic "PGWT", schema u16, module u8, metadata, named f32
// tensors, trailing CRC32 over everything before it.
void save_weights(const std::string& path, ModuleNet<float>& net,
                  const WeightsMeta& meta);
WeightsMeta load_weights(const std::string& path, ModuleNet<float>& net);

}  // namespace pgr::nets
