#pragma once

#include <cstdint>
#include <random>

namespace ico::rng {

// Stream tags keep derived seeds for unrelated random processes apart.
// Streams keyed by (root seed, tag, ids) are reproducible and independent of
// consumption order elsewhere, which is what keeps simulation runs with
// common random numbers aligned across scheduling policies.
enum class Stream : std::uint64_t {
  kArrival = 1,
  kQps = 2,
  kContention = 3,
  kResponse = 4,
  kHardware = 5,
  kDataset = 6,
  kDatasetConfig = 7,
  kPlacement = 8,
  kSplit = 9,
  kCalibration = 10,
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, Stream tag, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  std::uint64_t s = mix64(root + 0x9e3779b97f4a7c15ULL);
  s = mix64(s ^ (static_cast<std::uint64_t>(tag) * 0xff51afd7ed558ccdULL));
  s = mix64(s ^ (a * 0xc4ceb9fe1a85ec53ULL + 0x632be59bd9b4e019ULL));
  s = mix64(s ^ (b * 0x2545f4914f6cdd1dULL + 0x9e6c63d0a9c3f8f7ULL));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t root, Stream tag, std::uint64_t a = 0,
                                   std::uint64_t b = 0) {
  return std::mt19937_64(derive_seed(root, tag, a, b));
}

}  // namespace ico::rng
