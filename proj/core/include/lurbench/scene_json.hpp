#pragma once

#include <string>

#include "lurbench/scene.hpp"

namespace lur {

// Scene document: roads/zones/points arrays with class names as strings
// and coordinates in meters. Serialization is stable: equal scenes produce
// byte-identical documents.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

void save_scene(const Scene& scene, const std::string& path);
Scene load_scene(const std::string& path);

}  // namespace lur
