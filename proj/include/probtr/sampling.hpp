#pragma once

#include <cstdint>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "probtr/core.hpp"

namespace probtr {

/// Seedable generator: 64-bit Mersenne Twister (mt19937_64) with Boost's
/// portable uniform and normal transforms, so a seed reproduces the same
/// stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  Vector normal_vector(int n);
  // Uniform on the unit sphere in R^n.
  Vector unit_vector(int n);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::uniform_01<double> uniform_;
  boost::random::normal_distribution<double> normal_;
};

/// Ordered sample points around a center. points[0] is the center for every
/// generator in this module.
struct SampleSet {
  Vector center;
  double radius = 0.0;
  std::vector<Vector> points;
  std::vector<double> values;          // f(points[i]) once evaluated
  std::optional<double> condition;     // cond(M(Phi, scaled points)) when measured

  int size() const { return static_cast<int>(points.size()); }
  int dimension() const { return static_cast<int>(center.size()); }
  bool evaluated() const { return values.size() == points.size(); }
  // (points[i] - center) / radius
  Vector scaled(int i) const { return (points[static_cast<std::size_t>(i)] - center) / radius; }
  Vector values_vector() const;
};

// {center} plus `count` points center + delta z, z standard normal. Not clipped.
SampleSet gaussian_set(const Vector& center, double delta, int count, Rng& rng);

// {center} plus `count` points uniform in B(center, delta).
SampleSet ball_uniform_set(const Vector& center, double delta, int count, Rng& rng);

// {center, center + delta e1, center - delta e1, center + delta e2, ...}.
SampleSet coordinate_set(const Vector& center, double delta);

// coordinate_set followed by center + delta (e_i + e_j) for i < j in
// lexicographic order: (n+1)(n+2)/2 points, poised for quadratic interpolation.
SampleSet quadratic_coordinate_set(const Vector& center, double delta);

inline constexpr double kGreedyRadiusFactor = 2.0;

/// Up to max_points archived points nearest to center (ties by archive
/// index), restricted to ||y - center|| <= radius_factor * delta. The center
/// is always points[0]; exact repeats of a selected point are skipped.
/// Values are copied from the archive.
SampleSet greedy_reuse(const std::vector<ArchivedPoint>& archive, const Vector& center,
                       double delta, int max_points, double radius_factor = kGreedyRadiusFactor);

}  // namespace probtr
