#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace infoadapt {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent substream identified by a path of counters,
/// e.g. derive_seed(master, {replicate, kCandidateStream}). Replicate r is
/// reproducible in isolation from the master seed alone.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Random stream with platform-independent draws. Every public draw
/// consumes exactly one 64-bit engine output, except normal() which
/// consumes two; draws() counts engine outputs.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller (two engine outputs).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t next() {
    ++draws_;
    return engine_();
  }
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, RandomStream& rng);

}  // namespace infoadapt
