#pragma once

#include <array>
#include <string>
#include <vector>

#include "lurbench/scene.hpp"

namespace lur {

// Distance reported when no entity of the requested kind exists. Finite so
// that the model builders never see an infinity; noted in exports.
inline constexpr double kAbsentEntityDistanceM = 10000.0;

enum class StreetSet : int { big = 0, local };

enum class NearestKind : int {
  traffic_signal = 0,
  motorway,
  primary_road,
  industrial_premise,
};

// The 14 hand-crafted covariates: buffered land-use areas and street
// lengths at 50 m and 100 m plus four nearest-entity distances.
inline constexpr int kNumFeatures = 14;

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

// Fixed export order; index into FeatureVector::values.
const std::array<std::string, kNumFeatures>& feature_names();

// Area of `cls` zones inside the disk of radius r around center, in m^2.
// Computed by clipping each zone polygon against a 512-gon approximation
// of the disk (error well under the 0.5% oracle tolerance).
double buffer_area(const Scene& scene, const Vec2& center, LandUseClass cls,
                   double r);

// Total centerline length of streets of `set` inside the disk, in meters.
double buffer_length(const Scene& scene, const Vec2& center, StreetSet set,
                     double r);

// Euclidean distance to the nearest matching entity; polygons count as 0
// from inside. kAbsentEntityDistanceM when none exists.
double nearest_distance(const Scene& scene, const Vec2& center,
                        NearestKind kind);

FeatureVector feature_vector(const Scene& scene, const Vec2& center);

}  // namespace lur
