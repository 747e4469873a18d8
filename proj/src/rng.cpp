#include "nsi/rng.hpp"

#include <cmath>
#include <numbers>

namespace nsi {

namespace {

constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;

std::uint64_t avalanche(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(avalanche(seed + kPhi)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  RngStream s;
  s.key_ = avalanche(key_ ^ avalanche(index * kPhi + kStreamSalt));
  return s;
}

std::uint64_t RngStream::next_u64() {
  counter_ += 1;
  return avalanche(key_ + counter_ * kPhi);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * bound) >> 64);
}

double RngStream::next_uniform() {
  // top 53 bits plus a half-ulp offset: never 0, never 1
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_normal_ = radius * std::sin(angle);
  has_cached_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return avalanche(avalanche(seed + kPhi) ^ avalanche(a * kPhi + kStreamSalt) ^
                   avalanche(b + kStreamSalt));
}

}  // namespace nsi
