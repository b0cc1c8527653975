#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nkpa/constants.hpp"

namespace nkpa {

// splitmix64; used to derive independent substream seeds from
// (master seed, buffer index, role). Fixed algorithm, identical on
// every platform.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t role) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0x9e3779b97f4a7c15ull;
  std::uint64_t b = splitmix64(s);
  s ^= role * 0xd1342543de82ef95ull;
  std::uint64_t c = splitmix64(s);
  return a ^ (b << 1) ^ c;
}

// Deterministic standard-normal stream. mt19937_64 is fully specified by
// the standard and the Box-Muller transform below uses only elementary
// functions, so records reproduce bit-for-bit across platforms (module
// libm ulp differences, which the record format tolerates by storing codes).
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u in (0,1], v in [0,1)
    const double u =
        (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    const double v = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u));
    const double ang = kTwoPi * v;
    spare_ = r * std::sin(ang);
    have_spare_ = true;
    return r * std::cos(ang);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace nkpa
