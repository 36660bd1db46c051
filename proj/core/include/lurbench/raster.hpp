#pragma once

#include <cstdint>
#include <optional>

#include "lurbench/geo.hpp"
#include "lurbench/scene.hpp"

namespace lur {

// Paints the scene into a square RGB tile: background first, zones in list
// order, roads on top with class-dependent stroke widths. No labels are
// rendered. Supersamples 2x with nearest-neighbor resolution, then box
// downsamples.
TileImage rasterize(const Scene& scene, const GeoWindow& window, int out_px,
                    const Palette& palette);

// Satellite-like stand-in: rasterize with the muted palette, then add
// seeded per-pixel Gaussian texture noise (clipped to [0,1]).
TileImage synth_satellite(const Scene& scene, const GeoWindow& window,
                          int out_px, std::uint64_t noise_seed,
                          double noise_sigma = 0.1);

enum class RoadAxis : int { vertical = 0, horizontal };

// Either a land-use class or a road class painted as full-image cover.
using ProbeEntity = std::variant<LandUseClass, RoadClass>;

struct RoadOverlay {
  RoadClass cls = RoadClass::trunk;
  int width_px = 10;
  RoadAxis axis = RoadAxis::vertical;
  int offset_px = 0;  // signed offset of the road center from the image center
};

struct ArtificialTileSpec {
  ProbeEntity entity = LandUseClass::neutral;
  std::optional<RoadOverlay> overlay;
  int out_px = 224;
};

// Deterministic probe tile: uniform entity cover, optionally overlaid with
// a straight full-span road of exactly width_px at the given offset.
TileImage artificial_tile(const ArtificialTileSpec& spec,
                          const Palette& palette);

}  // namespace lur
