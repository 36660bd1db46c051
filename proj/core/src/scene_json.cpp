#include "lurbench/scene_json.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "lurbench/errors.hpp"

namespace lur {

using nlohmann::json;

namespace {

json points_to_json(const std::vector<Vec2>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(json::array({p.x, p.y}));
  return arr;
}

std::vector<Vec2> points_from_json(const json& arr) {
  std::vector<Vec2> pts;
  for (const auto& p : arr) {
    pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return pts;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  json doc;
  doc["background"] = to_string(scene.background);
  json roads = json::array();
  for (const auto& r : scene.roads) {
    roads.push_back({{"class", to_string(r.cls)},
                     {"width_m", r.width_m},
                     {"points", points_to_json(r.points)}});
  }
  doc["roads"] = std::move(roads);
  json zones = json::array();
  for (const auto& z : scene.zones) {
    zones.push_back(
        {{"class", to_string(z.cls)}, {"points", points_to_json(z.points)}});
  }
  doc["zones"] = std::move(zones);
  json pts = json::array();
  for (const auto& p : scene.points) {
    pts.push_back(
        {{"kind", to_string(p.kind)}, {"x_m", p.pos.x}, {"y_m", p.pos.y}});
  }
  doc["points"] = std::move(pts);
  return doc.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json doc = json::parse(text);
  Scene scene;
  scene.background =
      land_use_from_string(doc.value("background", std::string("neutral")));
  for (const auto& r : doc.value("roads", json::array())) {
    Road road;
    road.cls = road_class_from_string(r.at("class").get<std::string>());
    road.width_m = r.value("width_m", default_road_width_m(road.cls));
    road.points = points_from_json(r.at("points"));
    if (road.points.size() < 2)
      throw DataError("road polyline needs at least 2 vertices");
    if (road.width_m <= 0.0) throw DataError("road width must be positive");
    scene.roads.push_back(std::move(road));
  }
  for (const auto& z : doc.value("zones", json::array())) {
    Zone zone;
    zone.cls = land_use_from_string(z.at("class").get<std::string>());
    zone.points = points_from_json(z.at("points"));
    if (zone.points.size() < 3)
      throw DataError("zone polygon needs at least 3 vertices");
    scene.zones.push_back(std::move(zone));
  }
  for (const auto& p : doc.value("points", json::array())) {
    ScenePoint sp;
    sp.kind = point_kind_from_string(p.at("kind").get<std::string>());
    sp.pos = {p.at("x_m").get<double>(), p.at("y_m").get<double>()};
    scene.points.push_back(sp);
  }
  return scene;
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << scene_to_json(scene);
  if (!out) throw DataError("write failed: " + path);
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open scene file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return scene_from_json(text);
}

}  // namespace lur
