#include "lurbench/dataset.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lurbench/errors.hpp"
#include "lurbench/pngio.hpp"

namespace lur {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  // Atomic write: temp file then rename.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + tmp);
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
      if (row.size() != header.size())
        throw ShapeError("csv row width mismatch");
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << row[i];
      }
      out << '\n';
    }
    if (!out) throw DataError("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               int expect_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open csv: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (expect_columns >= 0 &&
        static_cast<int>(fields.size()) != expect_columns) {
      throw DataError("csv column count mismatch in " + path);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::string image_path(const DatasetManifest& manifest, long id) {
  return manifest.root + "/images/" + std::to_string(id) + ".png";
}

std::string satellite_image_path(const DatasetManifest& manifest, long id) {
  return manifest.root + "/images/" + std::to_string(id) + ".sat.png";
}

void save_manifest(const DatasetManifest& manifest) {
  fs::create_directories(manifest.root + "/images");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) {
    rows.push_back({std::to_string(s.id), format_double(s.x_m),
                    format_double(s.y_m), format_double(s.target_ugm3)});
  }
  write_csv(manifest.root + "/samples.csv",
            {"id", "x_m", "y_m", "target_ugm3"}, rows);

  json meta{
      {"side_m", manifest.side_m},
      {"zoom", manifest.zoom},
      {"lat_deg", manifest.lat_deg},
      {"out_px", manifest.out_px},
      {"semantics", to_string(manifest.semantics)},
      {"palette_hash", manifest.palette_hash},
      {"absent_distance_cap_m", manifest.absent_distance_cap_m},
      {"count", manifest.samples.size()},
  };
  std::ofstream out(manifest.root + "/metadata.json", std::ios::binary);
  if (!out) throw DataError("cannot write metadata.json");
  out << meta.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& root) {
  DatasetManifest m;
  m.root = root;

  std::ifstream meta_in(root + "/metadata.json", std::ios::binary);
  if (!meta_in) throw DataError("missing metadata.json in " + root);
  json meta = json::parse(meta_in);
  m.side_m = meta.at("side_m").get<double>();
  m.zoom = meta.at("zoom").get<int>();
  m.lat_deg = meta.at("lat_deg").get<double>();
  m.out_px = meta.at("out_px").get<int>();
  m.semantics =
      image_semantics_from_string(meta.at("semantics").get<std::string>());
  m.palette_hash = meta.at("palette_hash").get<std::uint64_t>();
  if (meta.contains("absent_distance_cap_m"))
    m.absent_distance_cap_m = meta.at("absent_distance_cap_m").get<double>();

  const auto rows = read_csv(root + "/samples.csv", 4);
  if (rows.empty() || rows[0][0] != "id")
    throw DataError("samples.csv must start with a header row");
  for (size_t i = 1; i < rows.size(); ++i) {
    SampleRow s;
    s.id = std::stol(rows[i][0]);
    s.x_m = std::stod(rows[i][1]);
    s.y_m = std::stod(rows[i][2]);
    s.target_ugm3 = std::stod(rows[i][3]);
    if (!std::isfinite(s.target_ugm3) || s.target_ugm3 <= 0.0)
      throw DataError("non-finite or non-positive target for id " +
                      rows[i][0]);
    m.samples.push_back(s);
  }

  // Exactly one image per id.
  for (const auto& s : m.samples) {
    if (!fs::exists(image_path(m, s.id)))
      throw DataError("missing image for id " + std::to_string(s.id));
    if (m.semantics == ImageSemantics::map_satellite &&
        !fs::exists(satellite_image_path(m, s.id)))
      throw DataError("missing satellite image for id " +
                      std::to_string(s.id));
  }
  for (size_t i = 1; i < m.samples.size(); ++i) {
    if (m.samples[i].id == m.samples[i - 1].id)
      throw DataError("duplicate sample id " +
                      std::to_string(m.samples[i].id));
  }
  return m;
}

std::vector<TileImage> load_images(const DatasetManifest& manifest) {
  std::vector<TileImage> images;
  images.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) {
    TileImage img;
    if (manifest.semantics == ImageSemantics::map_satellite) {
      TileImage map_img =
          read_png(image_path(manifest, s.id), ImageSemantics::map);
      TileImage sat_img = read_png(satellite_image_path(manifest, s.id),
                                   ImageSemantics::satellite_like);
      img = concat_channels(map_img, sat_img);
    } else {
      img = read_png(image_path(manifest, s.id), manifest.semantics);
    }
    if (!images.empty() && (img.height != images.front().height ||
                            img.width != images.front().width ||
                            img.channels != images.front().channels)) {
      throw DataError("inhomogeneous image shapes in " + manifest.root);
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<double> targets_of(const DatasetManifest& manifest) {
  std::vector<double> t;
  t.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) t.push_back(s.target_ugm3);
  return t;
}

}  // namespace lur
