#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmsbudget/assembly.hpp"
#include "cmsbudget/budget.hpp"
#include "cmsbudget/fem2d.hpp"

namespace cmsbudget {

struct GeometrySpec {
  enum class Kind { rectangle, right_triangle };
  Kind kind = Kind::rectangle;
  double width = 0.0;   // rectangle
  double height = 0.0;  // both
  double base = 0.0;    // right triangle
  int nx = 1, ny = 1;   // rectangle
  int n = 1;            // right triangle
  int order = 2;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
};

struct BoxSpec {
  Eigen::Vector2d min;
  Eigen::Vector2d max;
};

struct ComponentConfig {
  std::string id;
  GeometrySpec geometry;
  Material material;
  double modal_damping = 0.0;
  std::vector<BoxSpec> fixed_boxes;
};

/// A single force/displacement channel location on a component: either one
/// nodal DOF, or a finite-difference rotation realized by a marker-node pair.
struct DofSelector {
  enum class Kind { point, rotation_pair };
  Kind kind = Kind::point;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  int direction = 0;  // 0 = x, 1 = y
  Eigen::Vector2d pair_a = Eigen::Vector2d::Zero();
  Eigen::Vector2d pair_b = Eigen::Vector2d::Zero();
};

struct SpringSpec {
  std::string comp_a;
  DofSelector dof_a;
  std::string comp_b;
  DofSelector dof_b;
  double stiffness = 0.0;
};

struct PortSpec {
  std::string comp;
  DofSelector dof;
};

struct GridSpec {
  double f_max_hz = 0.0;
  int n_points = 200;
  std::string spacing = "linear";  // linear | log
  double f_min_hz = 0.0;           // log spacing only

  FrequencyGrid build() const;
};

struct RunConfig {
  std::vector<ComponentConfig> components;
  std::vector<SpringSpec> springs;
  std::vector<PortSpec> external_inputs;
  std::vector<PortSpec> outputs;
  GridSpec grid;
  double gamma = 0.05;
  double reference_multiplier = 10.0;
  std::vector<std::string> methods;
  uint64_t seed = 1;
  SynthesisOptions synthesis;
};

RunConfig load_run_config(const std::string& path);

struct BuiltAssembly {
  std::vector<AssemblyComponent> components;
  Interconnection coupling;
  FrequencyGrid grid;
};

/// Builds constrained, damped component models, expands spring and routing
/// records into the interconnection blocks (record order = channel order) and
/// attaches the channel maps B, F.
BuiltAssembly build_assembly(const RunConfig& config);

/// Writes the bundled three-component demo (frame, y-stage, z-stage) into
/// `dir` and returns the path of the run config.
std::string write_demo_config(const std::string& dir);

}  // namespace cmsbudget
