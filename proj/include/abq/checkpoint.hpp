// Binary checkpoints: magic "ABQ2", u32 version, u32 nx, u32 ny, f64 ly, t,
// nu, eta, g0, then u1, u2, theta coefficients as interleaved (re, im) f64,
// j-major. Little-endian throughout.
#pragma once

#include <cstdint>
#include <string>

#include "abq/field_algebra.hpp"

namespace abq {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  State state;
  Params params;
};

/// Throws std::runtime_error when the file cannot be written.
void write_checkpoint(const std::string& path, const State& state, const Params& params);

/// Throws std::runtime_error on I/O failure, bad magic, unknown version or
/// truncated data.
Checkpoint read_checkpoint(const std::string& path);

}  // namespace abq
