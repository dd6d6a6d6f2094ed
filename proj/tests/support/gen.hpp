#pragma once

// Hand-rolled generators shared by the property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qforest/dataset.hpp"

namespace qforest::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double angle(std::mt19937_64& rng) { return uniform(rng, -2.0 * std::numbers::pi, 2.0 * std::numbers::pi); }

inline std::vector<double> vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

/// Two Gaussian-free blobs split by a hyperplane through the origin with a margin.
inline data::Dataset separable(std::size_t n, std::size_t dims, std::uint64_t seed, double margin = 0.2) {
  std::mt19937_64 rng(seed);
  const auto normal = vec(rng, dims);
  double norm = 0.0;
  for (double w : normal) norm += w * w;
  norm = std::sqrt(norm);
  data::Dataset ds;
  ds.name = "separable";
  ds.num_features = dims;
  while (ds.samples.size() < n) {
    auto x = vec(rng, dims, -2.0, 2.0);
    double d = 0.0;
    for (std::size_t i = 0; i < dims; ++i) d += normal[i] * x[i];
    d /= norm;
    if (std::abs(d) < margin) continue;
    const int label = ds.samples.size() % 2 == 0 ? 1 : 0;
    if ((d > 0) != (label == 1)) {
      for (std::size_t i = 0; i < dims; ++i) x[i] -= 2.0 * d * normal[i] / norm;
    }
    ds.samples.push_back({std::move(x), label});
  }
  return ds;
}

/// Random labelled dataset with the given class sizes.
inline data::Dataset random_dataset(std::size_t n0, std::size_t n1, std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  data::Dataset ds;
  ds.name = "random";
  ds.num_features = dims;
  for (std::size_t i = 0; i < n0 + n1; ++i) ds.samples.push_back({vec(rng, dims), i < n0 ? 0 : 1});
  std::shuffle(ds.samples.begin(), ds.samples.end(), rng);
  return ds;
}

}  // namespace qforest::testing
