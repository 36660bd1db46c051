#pragma once

#include <string>
#include <vector>

#include "lurbench/scene.hpp"

namespace lur {

// 8-bit RGB PNG of a 3-channel tile.
void write_png(const TileImage& image, const std::string& path);

// Decodes any PNG to a 3-channel tile (palette expanded, alpha stripped,
// grayscale promoted). Throws DataError on malformed files.
TileImage read_png(const std::string& path, ImageSemantics semantics);

// 8-bit grayscale PNG; values clamped to [0,1].
void write_png_gray(const std::vector<float>& values, int height, int width,
                    const std::string& path);

}  // namespace lur
