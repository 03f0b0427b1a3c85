#include "probtr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace probtr {

Vector Rng::normal_vector(int n) {
  Vector z(n);
  for (int i = 0; i < n; ++i) z(i) = normal();
  return z;
}

Vector Rng::unit_vector(int n) {
  for (;;) {
    Vector z = normal_vector(n);
    const double norm = z.norm();
    if (norm > 0.0) return z / norm;
  }
}

Vector SampleSet::values_vector() const {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

namespace {

SampleSet start_set(const Vector& center, double delta) {
  SampleSet set;
  set.center = center;
  set.radius = delta;
  set.points.push_back(center);
  return set;
}

}  // namespace

SampleSet gaussian_set(const Vector& center, double delta, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("gaussian_set: count must be at least 1");
  SampleSet set = start_set(center, delta);
  const int n = static_cast<int>(center.size());
  for (int i = 0; i < count; ++i) set.points.push_back(center + delta * rng.normal_vector(n));
  return set;
}

SampleSet ball_uniform_set(const Vector& center, double delta, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("ball_uniform_set: count must be at least 1");
  SampleSet set = start_set(center, delta);
  const int n = static_cast<int>(center.size());
  for (int i = 0; i < count; ++i) {
    const Vector direction = rng.unit_vector(n);
    const double r = delta * std::pow(rng.uniform(), 1.0 / n);
    set.points.push_back(center + r * direction);
  }
  return set;
}

SampleSet coordinate_set(const Vector& center, double delta) {
  SampleSet set = start_set(center, delta);
  const int n = static_cast<int>(center.size());
  for (int i = 0; i < n; ++i) {
    Vector plus = center;
    plus(i) += delta;
    Vector minus = center;
    minus(i) -= delta;
    set.points.push_back(std::move(plus));
    set.points.push_back(std::move(minus));
  }
  return set;
}

SampleSet quadratic_coordinate_set(const Vector& center, double delta) {
  SampleSet set = coordinate_set(center, delta);
  const int n = static_cast<int>(center.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vector y = center;
      y(i) += delta;
      y(j) += delta;
      set.points.push_back(std::move(y));
    }
  }
  return set;
}

SampleSet greedy_reuse(const std::vector<ArchivedPoint>& archive, const Vector& center,
                       double delta, int max_points, double radius_factor) {
  if (archive.empty()) throw std::invalid_argument("greedy_reuse: empty archive");
  if (max_points < 1) throw std::invalid_argument("greedy_reuse: max_points must be at least 1");

  const double reach = radius_factor * delta;
  std::vector<std::size_t> order;
  std::vector<double> distance(archive.size());
  for (std::size_t i = 0; i < archive.size(); ++i) {
    distance[i] = (archive[i].x - center).norm();
    if (distance[i] <= reach) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return distance[a] < distance[b]; });

  SampleSet set;
  set.center = center;
  set.radius = delta;
  auto already_selected = [&](const Vector& y) {
    return std::any_of(set.points.begin(), set.points.end(), [&](const Vector& p) { return p == y; });
  };
  for (std::size_t idx : order) {
    if (set.size() >= max_points) break;
    const ArchivedPoint& entry = archive[idx];
    if (already_selected(entry.x)) continue;
    set.points.push_back(entry.x);
    set.values.push_back(entry.f);
  }
  if (set.points.empty() || set.points.front() != center) {
    throw std::invalid_argument("greedy_reuse: center is not in the archive");
  }
  return set;
}

}  // namespace probtr
