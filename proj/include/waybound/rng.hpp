/*
 * This code is part of Waybound.
 *
 * (C) Copyright Waybound Contributors 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 *
 * Any modifications or derivative works of this code must retain this
 * copyright notice, and modified files need to carry a notice indicating
 * that they have been altered from the originals.
 */

#ifndef WAYBOUND_RNG_HPP
#define WAYBOUND_RNG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace waybound {

/// Threefry-2x64, 20 rounds. A keyed counter-based random function: every
/// (counter, key) pair maps to two independent 64-bit words, so streams can
/// be carved out of the key space without coordination between consumers.
struct Threefry2x64 {
  static constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;

  static std::array<std::uint64_t, 2> block(std::array<std::uint64_t, 2> counter,
                                            std::array<std::uint64_t, 2> key) {
    constexpr int rot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key[0], key[1], kParity ^ key[0] ^ key[1]};
    std::uint64_t x0 = counter[0] + ks[0];
    std::uint64_t x1 = counter[1] + ks[1];
    for (int r = 0; r < 20; ++r) {
      x0 += x1;
      x1 = rotl(x1, rot[r % 8]);
      x1 ^= x0;
      if ((r + 1) % 4 == 0) {
        const int s = (r + 1) / 4;
        x0 += ks[s % 3];
        x1 += ks[(s + 1) % 3] + static_cast<std::uint64_t>(s);
      }
    }
    return {x0, x1};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
  }
};

/// Derives a fresh 64-bit seed from a master seed and two stream labels.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  return Threefry2x64::block({a, b}, {master, 0x9E3779B97F4A7C15ULL})[0];
}

/// Counter-based random stream. A (master seed, stream index) pair names the
/// stream; draws depend only on that pair and the number of values already
/// consumed, never on what other streams do. Gaussians use Box-Muller so the
/// byte sequence is identical across platforms and standard libraries.
class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream)
      : key_{master_seed, stream} {}

  std::uint64_t next_u64() {
    if (buf_pos_ == 2) {
      buf_ = Threefry2x64::block(counter_, key_);
      buf_pos_ = 0;
      if (++counter_[0] == 0) ++counter_[1];
    }
    return buf_[buf_pos_++];
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Complex value with independent N(0,1) real and imaginary parts.
  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 2> counter_{0, 0};
  std::array<std::uint64_t, 2> buf_{0, 0};
  int buf_pos_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace waybound

#endif  // WAYBOUND_RNG_HPP
