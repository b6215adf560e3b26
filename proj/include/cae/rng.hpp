#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace cae::num {

/// Seeded xoshiro256** generator. The state is expanded from the seed with
/// splitmix64, so the stream for a given seed is identical on every platform.
/// Single owner: never share an Rng across threads; derive children instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform in the open interval (0, 1): (top 53 bits + 0.5) / 2^53.
  double uniform() noexcept;
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard Gumbel(0, 1) via -log(-log(u)).
  double gumbel() noexcept;
  /// Standard normal via Box-Muller (one value per call, two uniforms consumed).
  double normal() noexcept;

  /// Independent generator for sub-task `stream`; depends only on (seed, stream).
  Rng child(std::uint64_t stream) const noexcept;

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

double sample_uniform(Rng& rng) noexcept;
double sample_gumbel(Rng& rng) noexcept;
/// The Gumbel transform on its own, for callers holding a uniform already.
double gumbel_from_uniform(double u) noexcept;

}  // namespace cae::num
