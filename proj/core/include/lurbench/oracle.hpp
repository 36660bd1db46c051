#pragma once

#include "lurbench/scene.hpp"

namespace lur {

// Ground-truth pollution at p: background plus exponentially decaying
// contributions of every road segment (line integral, <= 1 m arc-length
// quadrature) and every industrial zone. Always >= background.
double oracle_concentration(const Scene& scene, const Vec2& p,
                            const OracleParams& params);

// Same quadrature with a caller-chosen step; the 1 m production step is
// validated against a 0.01 m reference in the tests.
double oracle_concentration_with_step(const Scene& scene, const Vec2& p,
                                      const OracleParams& params,
                                      double step_m);

}  // namespace lur
