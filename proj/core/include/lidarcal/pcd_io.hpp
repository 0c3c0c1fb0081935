#pragma once

#include "lidarcal/geometry.hpp"

#include <string>

namespace lidarcal {

struct CloudReadResult {
  PointCloud cloud;
  std::size_t dropped_nan = 0;  // rows removed for non-finite coordinates
};

// Reads an ASCII point-cloud file (FIELDS/SIZE/TYPE/COUNT/WIDTH/HEIGHT/POINTS/
// DATA ascii header, one point per line). Fields must include x, y and z;
// extra columns are ignored. NaN rows are dropped and counted.
// Throws kIoError when the file cannot be opened and kParseError (naming the
// line) for malformed headers, missing fields or count mismatches.
CloudReadResult read_cloud(const std::string& path);

// Writes the ASCII variant with x/y/z as 4-byte floats, 9 significant digits.
void write_cloud(const PointCloud& cloud, const std::string& path);

}  // namespace lidarcal
