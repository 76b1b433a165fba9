#pragma once

#include <cstdint>
#include <random>

#include "gpa/types.hpp"

namespace gpa {

// Deterministic random stream addressed by (seed, stream_id). Two streams
// constructed with the same pair produce bit-identical draw sequences.
//
// The generator is std::mt19937_64 whose output is fully specified by the
// standard; the per-stream seed is derived by splitmix64 so that nearby
// (seed, stream_id) pairs land far apart in state space. Uniform doubles use
// the top 53 bits, normals use Box-Muller on uniform pairs; neither relies on
// the unspecified std::*_distribution algorithms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  double uniform();                        // [0, 1)
  double normal();                         // N(0, 1)
  std::size_t uniform_index(std::size_t n);  // {0, ..., n-1}, n >= 1

  ParamVector normal_vector(Eigen::Index dim, double stddev = 1.0);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gpa
