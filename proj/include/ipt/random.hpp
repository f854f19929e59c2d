#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ipt {

// All randomness flows from one user seed. Sub-streams are derived from
// (seed, purpose tag, key) so results never depend on processing order.

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over the bytes of `text`.
std::uint64_t hash_string(std::string_view text);

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::string_view key = {});
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Unbiased index in [0, n) by rejection. std::uniform_int_distribution is
/// implementation-defined, so it is avoided wherever output bytes matter.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

/// Uniform double in [0, 1) built from the top 53 bits.
double uniform_unit(std::mt19937_64& rng);

/// Standard normal draws via Box-Muller; same bytes on every platform.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
  double operator()();

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ipt
