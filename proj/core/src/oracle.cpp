#include "lurbench/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace lur {

namespace {

// Contributions beyond this many decay lengths are below double precision
// relative to the kernel peak; skipping whole segments there keeps the
// evaluation linear in nearby geometry only.
constexpr double kCutoffDecayLengths = 40.0;

double segment_line_integral(const Vec2& p, const Vec2& a, const Vec2& b,
                             double decay_m, double step_m) {
  const double len = (b - a).norm();
  if (len == 0.0) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil(len / step_m)));
  const double h = len / n;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) / n;
    const Vec2 q = a + (b - a) * t;
    acc += std::exp(-(p - q).norm() / decay_m);
  }
  return acc * h;
}

}  // namespace

double oracle_concentration_with_step(const Scene& scene, const Vec2& p,
                                      const OracleParams& params,
                                      double step_m) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y))
    throw std::invalid_argument("oracle point must be finite");
  if (params.decay_m <= 0.0)
    throw std::invalid_argument("decay length must be positive");

  const double cutoff = kCutoffDecayLengths * params.decay_m;
  double total = params.background_ugm3;

  for (const auto& road : scene.roads) {
    const double w = params.road_weight_ugm3[static_cast<int>(road.cls)];
    if (w == 0.0) continue;
    double integral = 0.0;
    for (size_t i = 0; i + 1 < road.points.size(); ++i) {
      const Vec2& a = road.points[i];
      const Vec2& b = road.points[i + 1];
      if (dist_point_segment(p, a, b) > cutoff) continue;
      integral += segment_line_integral(p, a, b, params.decay_m, step_m);
    }
    total += w * integral;
  }

  for (const auto& zone : scene.zones) {
    if (zone.cls != LandUseClass::industrial) continue;
    const double d = dist_point_polygon(p, zone.points);
    if (d > cutoff) continue;
    total += params.industrial_weight_ugm3 * std::exp(-d / params.decay_m);
  }
  return total;
}

double oracle_concentration(const Scene& scene, const Vec2& p,
                            const OracleParams& params) {
  return oracle_concentration_with_step(scene, p, params, 1.0);
}

}  // namespace lur
