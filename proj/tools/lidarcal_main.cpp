#include "lidarcal/error.hpp"
#include "lidarcal/pcd_io.hpp"
#include "lidarcal/pipeline.hpp"
#include "lidarcal/report.hpp"
#include "lidarcal/scene.hpp"
#include "lidarcal/spec_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace {

using namespace lidarcal;

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw CalibError(ErrorCode::kIoError, "missing input file " + path);
  }
}

int run_simulate(const std::string& scene_path, const std::string& rig_path,
                 const std::string& perturb_path, const std::string& out_dir,
                 std::uint64_t seed, bool seed_given) {
  require_file(scene_path);
  require_file(rig_path);
  SceneSpec scene_spec = load_scene_spec(scene_path);
  if (seed_given) scene_spec.seed = seed;
  const RigSpec rig = load_rig_spec(rig_path);

  std::filesystem::create_directories(out_dir);
  const Scene scene = generate_scene(scene_spec);
  const auto captures = capture(scene, rig);

  const RigidTransform master_from_world = rig.master().pose.inverse();
  NamedPoses truth;
  for (std::size_t i = 0; i < rig.sensors.size(); ++i) {
    const SensorSpec& sensor = rig.sensors[i];
    const std::string path = out_dir + "/" + sensor.frame_id + ".pcd";
    write_cloud(captures[i].cloud, path);
    std::cout << "wrote " << path << " (" << captures[i].cloud.size() << " points"
              << (captures[i].sparse ? ", sparse" : "") << ")\n";
    if (!sensor.master) {
      truth.emplace_back(sensor.frame_id, transform_to_euler(master_from_world * sensor.pose));
    }
  }
  const std::string truth_path = out_dir + "/ground_truth.txt";
  save_poses(truth, truth_path);
  std::cout << "wrote " << truth_path << " (slave->master extrinsics)\n";

  if (!perturb_path.empty()) {
    require_file(perturb_path);
    const PerturbationSpec spec = load_perturbation_spec(perturb_path);
    NamedPoses guesses;
    std::uint64_t index = 0;
    for (const auto& [frame, pose] : truth) {
      PerturbationSpec frame_spec = spec;
      frame_spec.seed = spec.seed + index++;
      const auto [guess, deviation] = perturb(euler_to_transform(pose), frame_spec);
      (void)deviation;
      guesses.emplace_back(frame, transform_to_euler(guess));
    }
    const std::string guess_path = out_dir + "/initial_guess.txt";
    save_poses(guesses, guess_path);
    std::cout << "wrote " << guess_path << " (perturbed extrinsics for calibrate --init)\n";
  }
  return 0;
}

int run_calibrate(const std::string& master_path, const std::vector<std::string>& slave_paths,
                  const std::string& config_path, const std::string& init_path,
                  std::uint64_t seed, bool seed_given, const std::string& out_path,
                  const std::string& poses_path) {
  require_file(master_path);
  for (const std::string& path : slave_paths) require_file(path);
  for (std::size_t i = 0; i < slave_paths.size(); ++i) {
    if (stem_of(slave_paths[i]) == stem_of(master_path)) {
      throw CalibError(ErrorCode::kInvalidArgument, "slave equals the master: " + slave_paths[i]);
    }
    for (std::size_t j = i + 1; j < slave_paths.size(); ++j) {
      if (stem_of(slave_paths[i]) == stem_of(slave_paths[j])) {
        throw CalibError(ErrorCode::kInvalidArgument,
                         "duplicate slave " + stem_of(slave_paths[i]));
      }
    }
  }

  PipelineConfig cfg;
  if (!config_path.empty()) {
    require_file(config_path);
    cfg = load_pipeline_config(config_path);
  }
  if (seed_given) cfg.seed = seed;

  NamedPoses initial_guesses;
  if (!init_path.empty()) {
    require_file(init_path);
    initial_guesses = load_poses(init_path);
  }
  const auto initial_for = [&](const std::string& frame) {
    for (const auto& [name, pose] : initial_guesses) {
      if (name == frame) return euler_to_transform(pose);
    }
    return RigidTransform::identity();
  };

  const PointCloud master = [&] {
    auto r = read_cloud(master_path);
    r.cloud.frame_id = stem_of(master_path);
    return r.cloud;
  }();

  CalibrationReport report;
  report.master_id = master.frame_id;
  report.trial_count = 1;
  report.threshold_rot_deg = cfg.success_rot_threshold_deg;
  report.threshold_trans_m = cfg.success_trans_threshold;
  report.include_timing = true;

  NamedPoses estimates;
  bool any_failed = false;
  for (const std::string& slave_path : slave_paths) {
    auto read = read_cloud(slave_path);
    read.cloud.frame_id = stem_of(slave_path);

    TrialRecord record;
    record.trial = 0;
    record.slave_id = read.cloud.frame_id;
    const RigidTransform initial = initial_for(record.slave_id);
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto [residual, trace] = calibrate_pair(master, apply(initial, read.cloud), cfg);
      const RigidTransform estimate = residual * initial;
      record.has_estimate = true;
      record.estimate = transform_to_euler(estimate);
      record.cost_rough = trace.stage("rough").cost;
      record.cost_icpn = cfg.run_icpn ? trace.stage("icpn").cost : record.cost_rough;
      record.cost_octree = cfg.run_octree ? trace.stage("octree").cost : record.cost_icpn;
      record.success = true;
      estimates.emplace_back(record.slave_id, record.estimate);
      std::cout << record.slave_id << ": ok, final cost " << record.cost_octree << " m^2\n";
    } catch (const CalibError& err) {
      record.success = false;
      switch (err.code()) {
        case ErrorCode::kDegenerateScene:
          record.reason = FailureReason::kDegenerateScene;
          break;
        case ErrorCode::kNoOverlap:
          record.reason = FailureReason::kNoOverlap;
          break;
        case ErrorCode::kCorrespondenceStarvation:
          record.reason = FailureReason::kCorrespondenceStarvation;
          break;
        case ErrorCode::kAmbiguousGround:
          record.reason = FailureReason::kAmbiguousGround;
          break;
        case ErrorCode::kNoGroundFound:
          record.reason = FailureReason::kNoGroundFound;
          break;
        default:
          throw;
      }
      any_failed = true;
      std::cout << record.slave_id << ": failed (" << failure_reason_name(record.reason)
                << ")\n";
    }
    record.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    report.records.push_back(record);
  }

  if (!out_path.empty()) {
    write_report(report, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  if (!poses_path.empty()) {
    save_poses(estimates, poses_path);
    std::cout << "wrote " << poses_path << "\n";
  }
  return any_failed ? 1 : 0;
}

int run_experiment_cmd(const std::string& scene_path, const std::string& rig_path,
                       const std::string& perturb_path, int trials, std::uint64_t seed,
                       bool seed_given, const std::string& config_path,
                       const std::string& out_path) {
  require_file(scene_path);
  require_file(rig_path);
  const SceneSpec scene_spec = load_scene_spec(scene_path);
  const RigSpec rig = load_rig_spec(rig_path);

  PerturbationSpec perturbation;
  if (!perturb_path.empty()) {
    require_file(perturb_path);
    perturbation = load_perturbation_spec(perturb_path);
  }
  PipelineConfig cfg;
  if (!config_path.empty()) {
    require_file(config_path);
    cfg = load_pipeline_config(config_path);
  }
  if (seed_given) {
    perturbation.seed = seed;
    cfg.seed = seed;
  }

  const CalibrationReport report = run_experiment(scene_spec, rig, perturbation, trials, cfg);

  std::size_t success = 0;
  for (const TrialRecord& r : report.records) {
    if (r.success) ++success;
  }
  std::cout << "trials " << trials << ", records " << report.records.size() << ", successes "
            << success << " ("
            << 100.0 * static_cast<double>(success) / static_cast<double>(report.records.size())
            << "%)\n";

  if (!out_path.empty()) {
    write_report(report, out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int run_evaluate(const std::string& estimate_path, const std::string& truth_path,
                 const std::string& out_path) {
  require_file(estimate_path);
  require_file(truth_path);
  const NamedPoses estimates = load_poses(estimate_path);
  const NamedPoses truths = load_poses(truth_path);

  std::ostringstream out;
  out << "# per-axis error: pitch_deg roll_deg yaw_deg x_m y_m z_m\n";
  for (const auto& [frame, estimate] : estimates) {
    const auto truth = std::find_if(truths.begin(), truths.end(),
                                    [&](const auto& t) { return t.first == frame; });
    if (truth == truths.end()) {
      throw CalibError(ErrorCode::kInvalidArgument,
                       "evaluate: no ground truth for frame " + frame);
    }
    const EulerPose err =
        pose_error(euler_to_transform(truth->second), euler_to_transform(estimate));
    char line[256];
    std::snprintf(line, sizeof(line), "error %s %.9g %.9g %.9g %.9g %.9g %.9g\n", frame.c_str(),
                  rad_to_deg(err.pitch), rad_to_deg(err.roll), rad_to_deg(err.yaw), err.x, err.y,
                  err.z);
    out << line;
  }
  std::cout << out.str();
  if (!out_path.empty()) {
    std::ofstream file(out_path);
    if (!file) throw CalibError(ErrorCode::kIoError, "cannot write " + out_path);
    file << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage multi-LiDAR extrinsic calibration (ground alignment + planar "
               "search, then normal-ICP + octree volume refinement)"};
  app.require_subcommand(1);

  std::string scene_path, rig_path, perturb_path, config_path, init_path;
  std::string master_path, out_path, poses_path, estimate_path, truth_path;
  std::vector<std::string> slave_paths;
  std::uint64_t seed = 0;
  int trials = 1;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic capture from scene + rig specs");
  simulate->add_option("--scene", scene_path, "scene spec file")->required();
  simulate->add_option("--rig", rig_path, "rig spec file")->required();
  simulate->add_option("--out", out_path, "output directory")->required();
  simulate->add_option("--perturb", perturb_path,
                       "also write perturbed initial guesses from this spec");
  auto* sim_seed = simulate->add_option("--seed", seed, "override the scene seed");

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate slave clouds against a master cloud");
  calibrate->add_option("--master", master_path, "master point cloud (.pcd)")->required();
  calibrate->add_option("--slaves", slave_paths, "slave point clouds (.pcd)")->required();
  calibrate->add_option("--config", config_path, "pipeline config file");
  calibrate->add_option("--init", init_path,
                        "pose file with initial extrinsic guesses (else identity)");
  auto* cal_seed = calibrate->add_option("--seed", seed, "RANSAC seed");
  calibrate->add_option("--out", out_path, "report file");
  calibrate->add_option("--poses", poses_path, "write estimated extrinsics as a pose file");

  auto* experiment = app.add_subcommand("experiment", "Run a perturbation-recovery batch and report statistics");
  experiment->add_option("--scene", scene_path, "scene spec file")->required();
  experiment->add_option("--rig", rig_path, "rig spec file")->required();
  experiment->add_option("--perturb", perturb_path, "perturbation spec file");
  experiment->add_option("--trials", trials, "number of trials")->required();
  auto* exp_seed = experiment->add_option("--seed", seed, "experiment seed");
  experiment->add_option("--config", config_path, "pipeline config file");
  experiment->add_option("--out", out_path, "report file");

  auto* evaluate = app.add_subcommand("evaluate", "Per-axis errors of estimated vs ground-truth extrinsics");
  evaluate->add_option("--estimate", estimate_path, "estimated pose file")->required();
  evaluate->add_option("--truth", truth_path, "ground-truth pose file")->required();
  evaluate->add_option("--out", out_path, "also write the errors to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) {
      return run_simulate(scene_path, rig_path, perturb_path, out_path, seed,
                          !sim_seed->empty());
    }
    if (calibrate->parsed()) {
      return run_calibrate(master_path, slave_paths, config_path, init_path, seed,
                           !cal_seed->empty(), out_path, poses_path);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(scene_path, rig_path, perturb_path, trials, seed,
                                !exp_seed->empty(), config_path, out_path);
    }
    if (evaluate->parsed()) {
      return run_evaluate(estimate_path, truth_path, out_path);
    }
  } catch (const CalibError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 2;
}
