#include "lidarcal/pcd_io.hpp"

#include "lidarcal/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace lidarcal {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
  throw CalibError(ErrorCode::kParseError, path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

CloudReadResult read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::kIoError, "cannot open " + path);
  }

  std::size_t line_no = 0;
  std::string line;
  long declared_points = -1;
  long width = -1, height = -1;
  int ix = -1, iy = -1, iz = -1;
  std::size_t field_count = 0;
  bool data_seen = false;

  while (!data_seen && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '#') continue;
    const auto tokens = split(line);
    if (tokens.empty()) continue;
    const std::string& key = tokens[0];
    if (key == "FIELDS") {
      field_count = tokens.size() - 1;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (tokens[i] == "x") ix = static_cast<int>(i - 1);
        if (tokens[i] == "y") iy = static_cast<int>(i - 1);
        if (tokens[i] == "z") iz = static_cast<int>(i - 1);
      }
    } else if (key == "POINTS") {
      if (tokens.size() != 2) parse_fail(path, line_no, "POINTS wants one value");
      declared_points = std::stol(tokens[1]);
    } else if (key == "WIDTH") {
      width = std::stol(tokens[1]);
    } else if (key == "HEIGHT") {
      height = std::stol(tokens[1]);
    } else if (key == "DATA") {
      if (tokens.size() != 2 || tokens[1] != "ascii") {
        parse_fail(path, line_no, "only DATA ascii is supported");
      }
      data_seen = true;
    }
    // VERSION / SIZE / TYPE / COUNT / VIEWPOINT are accepted and not checked.
  }

  if (!data_seen) parse_fail(path, line_no, "missing DATA ascii header");
  if (ix < 0 || iy < 0 || iz < 0) parse_fail(path, line_no, "FIELDS must include x, y and z");
  if (declared_points < 0) {
    if (width >= 0 && height >= 0) {
      declared_points = width * height;
    } else {
      parse_fail(path, line_no, "missing POINTS count");
    }
  }
  if (width >= 0 && height >= 0 && width * height != declared_points) {
    parse_fail(path, line_no, "WIDTH*HEIGHT does not match POINTS");
  }

  CloudReadResult result;
  result.cloud.points.reserve(static_cast<std::size_t>(declared_points));
  long parsed = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split(line);
    if (tokens.empty()) continue;
    if (tokens.size() < field_count) {
      parse_fail(path, line_no, "row has fewer columns than FIELDS");
    }
    double x, y, z;
    try {
      x = std::stod(tokens[ix]);
      y = std::stod(tokens[iy]);
      z = std::stod(tokens[iz]);
    } catch (const std::exception&) {
      parse_fail(path, line_no, "cannot parse coordinate");
    }
    ++parsed;
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      ++result.dropped_nan;
      continue;
    }
    result.cloud.points.emplace_back(x, y, z);
  }

  if (parsed != declared_points) {
    parse_fail(path, line_no,
               "declared " + std::to_string(declared_points) + " points but parsed " +
                   std::to_string(parsed));
  }
  return result;
}

void write_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::kIoError, "cannot write " + path);
  }
  out << "VERSION .7\n"
      << "FIELDS x y z\n"
      << "SIZE 4 4 4\n"
      << "TYPE F F F\n"
      << "COUNT 1 1 1\n"
      << "WIDTH " << cloud.size() << "\n"
      << "HEIGHT 1\n"
      << "VIEWPOINT 0 0 0 1 0 0 0\n"
      << "POINTS " << cloud.size() << "\n"
      << "DATA ascii\n";
  char buffer[128];
  for (const Point3& p : cloud.points) {
    std::snprintf(buffer, sizeof(buffer), "%.9g %.9g %.9g\n", p.x(), p.y(), p.z());
    out << buffer;
  }
  if (!out) {
    throw CalibError(ErrorCode::kIoError, "write failed for " + path);
  }
}

}  // namespace lidarcal
