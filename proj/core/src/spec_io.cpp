#include "lidarcal/spec_io.hpp"

#include "lidarcal/error.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace lidarcal {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw CalibError(ErrorCode::kParseError, path + ":" + std::to_string(line) + ": " + what);
}

std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::kIoError, "cannot open " + path);
  }
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream stream(raw);
    Line line{number, {}};
    std::string tok;
    while (stream >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

double parse_double(const std::string& path, const Line& line, const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) fail(path, line.number, "bad number '" + tok + "'");
    return v;
  } catch (const CalibError&) {
    throw;
  } catch (const std::exception&) {
    fail(path, line.number, "bad number '" + tok + "'");
  }
}

void expect_values(const std::string& path, const Line& line, std::size_t count) {
  if (line.tokens.size() != count + 1) {
    fail(path, line.number,
         line.tokens[0] + " wants " + std::to_string(count) + " values");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::kIoError, "cannot write " + path);
  }
  return out;
}

std::string fmt(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.9g", v);
  return buffer;
}

EulerPose parse_pose_values(const std::string& path, const Line& line, std::size_t offset) {
  EulerPose pose;
  pose.pitch = deg_to_rad(parse_double(path, line, line.tokens[offset + 0]));
  pose.roll = deg_to_rad(parse_double(path, line, line.tokens[offset + 1]));
  pose.yaw = deg_to_rad(parse_double(path, line, line.tokens[offset + 2]));
  pose.x = parse_double(path, line, line.tokens[offset + 3]);
  pose.y = parse_double(path, line, line.tokens[offset + 4]);
  pose.z = parse_double(path, line, line.tokens[offset + 5]);
  return pose;
}

std::string pose_values(const EulerPose& pose) {
  std::ostringstream out;
  out << fmt(rad_to_deg(pose.pitch)) << ' ' << fmt(rad_to_deg(pose.roll)) << ' '
      << fmt(rad_to_deg(pose.yaw)) << ' ' << fmt(pose.x) << ' ' << fmt(pose.y) << ' '
      << fmt(pose.z);
  return out.str();
}

}  // namespace

SceneSpec load_scene_spec(const std::string& path) {
  SceneSpec spec;
  spec.primitives.clear();
  for (const Line& line : read_lines(path)) {
    const std::string& key = line.tokens[0];
    if (key == "seed") {
      expect_values(path, line, 1);
      spec.seed = static_cast<std::uint64_t>(parse_double(path, line, line.tokens[1]));
    } else if (key == "density") {
      expect_values(path, line, 1);
      spec.density = parse_double(path, line, line.tokens[1]);
    } else if (key == "noise_sigma") {
      expect_values(path, line, 1);
      spec.noise_sigma = parse_double(path, line, line.tokens[1]);
    } else if (key == "ground") {
      expect_values(path, line, 2);
      spec.ground_size_x = parse_double(path, line, line.tokens[1]);
      spec.ground_size_y = parse_double(path, line, line.tokens[2]);
    } else if (key == "wall") {
      expect_values(path, line, 5);
      Primitive prim;
      prim.type = PrimitiveType::kWall;
      prim.cx = parse_double(path, line, line.tokens[1]);
      prim.cy = parse_double(path, line, line.tokens[2]);
      prim.yaw = deg_to_rad(parse_double(path, line, line.tokens[3]));
      prim.a = parse_double(path, line, line.tokens[4]);
      prim.b = parse_double(path, line, line.tokens[5]);
      spec.primitives.push_back(prim);
    } else if (key == "box") {
      expect_values(path, line, 6);
      Primitive prim;
      prim.type = PrimitiveType::kBox;
      prim.cx = parse_double(path, line, line.tokens[1]);
      prim.cy = parse_double(path, line, line.tokens[2]);
      prim.yaw = deg_to_rad(parse_double(path, line, line.tokens[3]));
      prim.a = parse_double(path, line, line.tokens[4]);
      prim.b = parse_double(path, line, line.tokens[5]);
      prim.c = parse_double(path, line, line.tokens[6]);
      spec.primitives.push_back(prim);
    } else if (key == "pole") {
      expect_values(path, line, 4);
      Primitive prim;
      prim.type = PrimitiveType::kPole;
      prim.cx = parse_double(path, line, line.tokens[1]);
      prim.cy = parse_double(path, line, line.tokens[2]);
      prim.yaw = 0.0;
      prim.a = parse_double(path, line, line.tokens[3]);
      prim.b = parse_double(path, line, line.tokens[4]);
      spec.primitives.push_back(prim);
    } else {
      fail(path, line.number, "unknown scene key '" + key + "'");
    }
  }
  return spec;
}

void save_scene_spec(const SceneSpec& spec, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# scene spec: lengths in meters, angles in degrees\n";
  out << "seed " << spec.seed << '\n';
  out << "density " << fmt(spec.density) << '\n';
  out << "noise_sigma " << fmt(spec.noise_sigma) << '\n';
  out << "ground " << fmt(spec.ground_size_x) << ' ' << fmt(spec.ground_size_y) << '\n';
  for (const Primitive& prim : spec.primitives) {
    switch (prim.type) {
      case PrimitiveType::kWall:
        out << "wall " << fmt(prim.cx) << ' ' << fmt(prim.cy) << ' ' << fmt(rad_to_deg(prim.yaw))
            << ' ' << fmt(prim.a) << ' ' << fmt(prim.b) << '\n';
        break;
      case PrimitiveType::kBox:
        out << "box " << fmt(prim.cx) << ' ' << fmt(prim.cy) << ' ' << fmt(rad_to_deg(prim.yaw))
            << ' ' << fmt(prim.a) << ' ' << fmt(prim.b) << ' ' << fmt(prim.c) << '\n';
        break;
      case PrimitiveType::kPole:
        out << "pole " << fmt(prim.cx) << ' ' << fmt(prim.cy) << ' ' << fmt(prim.a) << ' '
            << fmt(prim.b) << '\n';
        break;
    }
  }
}

RigSpec load_rig_spec(const std::string& path) {
  RigSpec rig;
  rig.sensors.clear();
  for (const Line& line : read_lines(path)) {
    const std::string& key = line.tokens[0];
    if (key == "max_range") {
      expect_values(path, line, 1);
      rig.max_range = parse_double(path, line, line.tokens[1]);
    } else if (key == "fov_deg") {
      expect_values(path, line, 1);
      rig.fov_deg = parse_double(path, line, line.tokens[1]);
    } else if (key == "sensor") {
      expect_values(path, line, 8);
      SensorSpec sensor;
      sensor.frame_id = line.tokens[1];
      if (line.tokens[2] == "master") {
        sensor.master = true;
      } else if (line.tokens[2] == "slave") {
        sensor.master = false;
      } else {
        fail(path, line.number, "sensor role must be master or slave");
      }
      sensor.pose = euler_to_transform(parse_pose_values(path, line, 3));
      rig.sensors.push_back(sensor);
    } else {
      fail(path, line.number, "unknown rig key '" + key + "'");
    }
  }
  rig.master();  // validates exactly one master
  return rig;
}

void save_rig_spec(const RigSpec& rig, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# rig spec: sensor <frame> <master|slave> <pitch roll yaw deg> <x y z m>\n";
  out << "max_range " << fmt(rig.max_range) << '\n';
  out << "fov_deg " << fmt(rig.fov_deg) << '\n';
  for (const SensorSpec& sensor : rig.sensors) {
    out << "sensor " << sensor.frame_id << ' ' << (sensor.master ? "master" : "slave") << ' '
        << pose_values(transform_to_euler(sensor.pose)) << '\n';
  }
}

PerturbationSpec load_perturbation_spec(const std::string& path) {
  PerturbationSpec spec;
  for (const Line& line : read_lines(path)) {
    const std::string& key = line.tokens[0];
    expect_values(path, line, 1);
    if (key == "rotation_bound_deg") {
      spec.rotation_bound_deg = parse_double(path, line, line.tokens[1]);
    } else if (key == "translation_bound") {
      spec.translation_bound = parse_double(path, line, line.tokens[1]);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_double(path, line, line.tokens[1]));
    } else {
      fail(path, line.number, "unknown perturbation key '" + key + "'");
    }
  }
  return spec;
}

void save_perturbation_spec(const PerturbationSpec& spec, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "rotation_bound_deg " << fmt(spec.rotation_bound_deg) << '\n';
  out << "translation_bound " << fmt(spec.translation_bound) << '\n';
  out << "seed " << spec.seed << '\n';
}

PipelineConfig load_pipeline_config(const std::string& path) {
  PipelineConfig cfg;
  for (const Line& line : read_lines(path)) {
    const std::string& key = line.tokens[0];
    expect_values(path, line, 1);
    const std::string& tok = line.tokens[1];
    const auto value = [&] { return parse_double(path, line, tok); };
    if (key == "ground_epsilon") {
      cfg.ground_epsilon = value();
    } else if (key == "ransac_iterations") {
      cfg.ransac_iterations = static_cast<int>(value());
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(value());
    } else if (key == "planar_yaw_range_deg") {
      cfg.planar.yaw_range = deg_to_rad(value());
    } else if (key == "planar_coarse_step_deg") {
      cfg.planar.coarse_step = deg_to_rad(value());
    } else if (key == "planar_refine_levels") {
      cfg.planar.refine_levels = static_cast<int>(value());
    } else if (key == "planar_xy_range") {
      cfg.planar.xy_range = value();
    } else if (key == "planar_xy_step") {
      cfg.planar.xy_step = value();
    } else if (key == "planar_max_correspondence_dist") {
      cfg.planar.max_correspondence_dist = value();
    } else if (key == "planar_downsample_voxel") {
      cfg.planar.downsample_voxel = value();
    } else if (key == "icpn_enabled") {
      cfg.run_icpn = value() != 0.0;
    } else if (key == "icpn_max_iterations") {
      cfg.icpn.max_iterations = static_cast<int>(value());
    } else if (key == "icpn_max_correspondence_dist") {
      cfg.icpn.max_correspondence_dist = value();
    } else if (key == "icpn_normal_angle_gate_deg") {
      cfg.icpn.normal_angle_gate = deg_to_rad(value());
    } else if (key == "icpn_convergence_translation") {
      cfg.icpn.convergence_translation = value();
    } else if (key == "icpn_convergence_rotation") {
      cfg.icpn.convergence_rotation = value();
    } else if (key == "icpn_normal_k") {
      cfg.icpn.normal_k = static_cast<std::size_t>(value());
    } else if (key == "octree_enabled") {
      cfg.run_octree = value() != 0.0;
    } else if (key == "octree_max_depth") {
      cfg.octree.max_depth = static_cast<int>(value());
    } else if (key == "octree_target_leaf_side") {
      cfg.octree.target_leaf_side = value();
    } else if (key == "octree_angle_step_deg") {
      cfg.octree.angle_step_init = deg_to_rad(value());
    } else if (key == "octree_trans_step") {
      cfg.octree.trans_step_init = value();
    } else if (key == "octree_halvings") {
      cfg.octree.halvings = static_cast<int>(value());
    } else if (key == "octree_sweep_halfwidth") {
      cfg.octree.sweep_halfwidth = static_cast<int>(value());
    } else if (key == "success_rot_threshold_deg") {
      cfg.success_rot_threshold_deg = value();
    } else if (key == "success_trans_threshold") {
      cfg.success_trans_threshold = value();
    } else {
      fail(path, line.number, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

NamedPoses load_poses(const std::string& path) {
  NamedPoses poses;
  for (const Line& line : read_lines(path)) {
    if (line.tokens[0] != "pose") {
      fail(path, line.number, "expected 'pose <frame> <pitch roll yaw x y z>'");
    }
    expect_values(path, line, 7);
    poses.emplace_back(line.tokens[1], parse_pose_values(path, line, 2));
  }
  return poses;
}

void save_poses(const NamedPoses& poses, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "# pose <frame> <pitch_deg> <roll_deg> <yaw_deg> <x_m> <y_m> <z_m>\n";
  for (const auto& [frame, pose] : poses) {
    out << "pose " << frame << ' ' << pose_values(pose) << '\n';
  }
}

}  // namespace lidarcal
