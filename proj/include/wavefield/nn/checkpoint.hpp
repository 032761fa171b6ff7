#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wavefield/nn/tensor.hpp"

namespace wavefield::nn {

inline constexpr char kCheckpointMagic[5] = {'W', 'V', 'F', 'P', '1'};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout (little-endian): magic "WVFP1", u32 block count, then per block:
// u16 name length, name bytes, u8 complex flag, u32 rank, rank x u64 dims,
// real_count x f64 values.

/// Exact file size for the given blocks.
std::size_t checkpoint_size(const std::vector<const ParamBlock*>& blocks);

void save_checkpoint(const std::string& path, const std::vector<const ParamBlock*>& blocks);

/// Loads values into `blocks` by name; every block must be present with the
/// same shape and kind.
void load_checkpoint(const std::string& path, const std::vector<ParamBlock*>& blocks);

}  // namespace wavefield::nn
