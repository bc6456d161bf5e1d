#pragma once

#include "pretouch/pointcloud.hpp"

#include <iosfwd>
#include <string>

namespace pretouch {

// ASCII PCD v0.7 with float x y z fields. Header keys must appear in the
// canonical order (VERSION FIELDS SIZE TYPE COUNT WIDTH HEIGHT VIEWPOINT
// POINTS DATA). Extra float fields are skipped on load; rows holding a
// non-finite coordinate are dropped.

PointCloud read_pcd(std::istream& in);
void write_pcd(std::ostream& out, const PointCloud& cloud);

/// Throws FormatError / UnsupportedFormatError, or std::runtime_error when the
/// file cannot be opened.
PointCloud load_pcd(const std::string& path);
void save_pcd(const PointCloud& cloud, const std::string& path);

}  // namespace pretouch
