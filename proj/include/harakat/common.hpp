#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace harakat {

// Base of all library errors. Validation errors map to CLI exit code 2,
// everything else to 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};

struct MalformedWord : ValidationError { using ValidationError::ValidationError; };
struct LengthMismatch : ValidationError { using ValidationError::ValidationError; };
struct AlignmentError : ValidationError { using ValidationError::ValidationError; };
struct UnknownPosTag : ValidationError { using ValidationError::ValidationError; };
struct EmptyCorpus : ValidationError { using ValidationError::ValidationError; };
struct ParseError : ValidationError { using ValidationError::ValidationError; };
struct DimensionMismatch : ValidationError { using ValidationError::ValidationError; };
struct ConfigError : ValidationError { using ValidationError::ValidationError; };
struct ConfigMismatch : ValidationError { using ValidationError::ValidationError; };
struct CorruptCheckpoint : ValidationError { using ValidationError::ValidationError; };
struct VersionMismatch : ValidationError { using ValidationError::ValidationError; };

struct IndexOutOfRange : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct EmptyWord : Error { using Error::Error; };
struct InvalidProbability : Error { using Error::Error; };
struct DegenerateVariance : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a stream tag.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

// Deterministic RNG. All draws go through explicit integer arithmetic on the
// mt19937_64 output so results do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  Rng() : eng_(0) {}
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t u64() { return eng_(); }

  // [0, 1) with 53 random bits.
  double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; the second value of each pair is discarded so the generator
  // state is fully captured by the engine.
  double normal(double mean, double stddev) {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * 3.141592653589793238462643 * u2);
  }

  // Uniform integer in [0, n) by rejection.
  uint64_t bounded(uint64_t n) {
    if (n == 0) return 0;
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << eng_;
    return os.str();
  }
  void deserialize(const std::string& s) {
    std::istringstream is(s);
    is >> eng_;
    if (!is) throw CorruptCheckpoint("bad rng state");
  }

 private:
  std::mt19937_64 eng_;
};

// In-place Fisher-Yates; avoids std::shuffle so the permutation is identical
// across standard libraries.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = size_t(rng.bounded(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace harakat
