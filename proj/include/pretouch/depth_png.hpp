#pragma once

#include "pretouch/pointcloud.hpp"

#include <string>

namespace pretouch {

/// Reads a 16-bit single-channel PNG of millimeter depths. 8-bit, color and
/// alpha images are rejected with UnsupportedFormatError.
DepthImage load_depth_png(const std::string& path);
void save_depth_png(const DepthImage& img, const std::string& path);

}  // namespace pretouch
