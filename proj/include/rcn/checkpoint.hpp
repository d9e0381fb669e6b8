#pragma once

#include "rcn/policy.hpp"

#include <cstdint>
#include <string>

namespace rcn {

struct Checkpoint {
  PolicySpec spec;
  std::uint64_t seed = 0;
  Eigen::VectorXd params;
};

/// Text checkpoint. Line 1:
///   <kind> hidden=<n> layers=<n> obs=<n> act=<n> biases=<0|1> seed=<n>
/// followed by one parameter per line in layout order, 17 significant
/// digits. Save/load round-trips are bit-exact.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace rcn
