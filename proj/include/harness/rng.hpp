#pragma once

#include <array>
#include <cstdint>

namespace harness {

// Counter-based generator (Philox 4x32-10, Salmon et al. 2011). A draw is a
// pure function of (seed, stream, counter): identical keys give identical
// values on any thread layout, and distinct streams are independent without
// storing state.
namespace philox {

struct Block {
  std::uint32_t w[4];
};

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Block run(std::uint64_t key, const Block& counter) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::uint32_t c0 = counter.w[0], c1 = counter.w[1], c2 = counter.w[2], c3 = counter.w[3];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kMulA, c0, hi0, lo0);
    mul_hi_lo(kMulB, c2, hi1, lo1);
    std::uint32_t n0 = hi1 ^ c1 ^ k0;
    std::uint32_t n1 = lo1;
    std::uint32_t n2 = hi0 ^ c3 ^ k1;
    std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kWeylA;
    k1 += kWeylB;
  }
  return Block{{c0, c1, c2, c3}};
}

}  // namespace philox

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Noise key lanes keep logically distinct consumers of the noise field on
// disjoint streams for the same (seed, replica).
enum class NoiseLane : std::uint32_t {
  Dynamics = 0,    // the driving field xi_t(x)
  Innovation = 1,  // initial-law innovations
  Closure = 2,     // stationary-tail closure draws
  Bootstrap = 3,   // resampling indices
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  NoiseLane lane = NoiseLane::Dynamics;

  std::uint64_t cipher_key() const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(replica) * 0x9E3779B97F4A7C15ull +
                                 (static_cast<std::uint64_t>(lane) << 56));
    return seed ^ h;
  }
};

// One 128-bit block per (t, x) cell; x coordinates beyond dimension d are 0.
inline philox::Block draw_block(const StreamKey& stream, long t, int x0, int x1 = 0, int x2 = 0) {
  philox::Block ctr;
  ctr.w[0] = static_cast<std::uint32_t>(static_cast<std::int32_t>(t));
  ctr.w[1] = static_cast<std::uint32_t>(x0);
  ctr.w[2] = static_cast<std::uint32_t>(x1);
  ctr.w[3] = static_cast<std::uint32_t>(x2);
  return philox::run(stream.cipher_key(), ctr);
}

inline std::uint64_t to_u64(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Uniform on (0,1): 53 mantissa bits, offset keeps 0 out of range.
inline double to_unit(std::uint64_t u) {
  return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal cdf, Wichura's AS 241 (PPND16); relative
// error below 1e-15 across (0,1).
double inverse_normal_cdf(double p);

}  // namespace harness
