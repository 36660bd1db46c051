#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lurbench/scene.hpp"

namespace lur {

struct SampleRow {
  long id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double target_ugm3 = 0.0;
};

// One dataset split on disk:
//   <root>/samples.csv           id,x_m,y_m,target_ugm3
//   <root>/images/<id>.png       primary tile (map or satellite-like)
//   <root>/images/<id>.sat.png   satellite half of map+satellite datasets
//   <root>/metadata.json         window geometry, palette hash, semantics
struct DatasetManifest {
  std::string root;
  std::vector<SampleRow> samples;

  double side_m = 80.0;
  int zoom = 17;
  double lat_deg = 51.5;
  int out_px = 224;
  ImageSemantics semantics = ImageSemantics::map;
  std::uint64_t palette_hash = 0;
  double absent_distance_cap_m = 10000.0;
};

void save_manifest(const DatasetManifest& manifest);

// Loads and checks the invariants: unique ids with exactly one image each,
// homogeneous image shapes (verified on load_images), finite positive
// targets.
DatasetManifest load_manifest(const std::string& root);

std::string image_path(const DatasetManifest& manifest, long id);
std::string satellite_image_path(const DatasetManifest& manifest, long id);

// Tiles in samples order; map+satellite manifests yield 6-channel tiles.
std::vector<TileImage> load_images(const DatasetManifest& manifest);

std::vector<double> targets_of(const DatasetManifest& manifest);

// Minimal CSV support shared by exporters: quotes are not needed by any
// of our writers, so values are raw fields.
void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               int expect_columns = -1);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace lur
