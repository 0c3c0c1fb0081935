#pragma once

#include "lidarcal/pipeline.hpp"
#include "lidarcal/scene.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lidarcal {

// Structured-text readers and writers for the file formats described in
// docs/formats.md. Angles in files are degrees; lengths are meters. All
// parsers throw kParseError naming the offending line and kIoError for
// unreadable paths.

SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const SceneSpec& spec, const std::string& path);

RigSpec load_rig_spec(const std::string& path);
void save_rig_spec(const RigSpec& rig, const std::string& path);

PerturbationSpec load_perturbation_spec(const std::string& path);
void save_perturbation_spec(const PerturbationSpec& spec, const std::string& path);

// Applies `key value` overrides onto a default-constructed PipelineConfig.
PipelineConfig load_pipeline_config(const std::string& path);

// Named poses, e.g. ground-truth extrinsics: `pose <frame> <6 values>`.
using NamedPoses = std::vector<std::pair<std::string, EulerPose>>;
NamedPoses load_poses(const std::string& path);
void save_poses(const NamedPoses& poses, const std::string& path);

}  // namespace lidarcal
