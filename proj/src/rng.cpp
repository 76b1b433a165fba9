#include "gpa/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "gpa/types.hpp"

namespace gpa {

void require_finite(const ParamVector& v, const std::string& what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(what + ": non-finite entries");
  }
}

void require_same_dim(const ParamVector& a, const ParamVector& b, const std::string& what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(what + ": dimension mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= stream_id * 0xD1B54A32D192ED03ULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9E3779B97F4A7C15ULL);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), gen_(derive_stream_seed(seed, stream_id)) {}

std::uint64_t RngStream::next_u64() { return gen_(); }

double RngStream::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 is nudged away from zero so log stays finite.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  return static_cast<std::size_t>(gen_() % n);
}

ParamVector RngStream::normal_vector(Eigen::Index dim, double stddev) {
  ParamVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = stddev * normal();
  return v;
}

}  // namespace gpa
