#include "cmsbudget/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void expect_keys(const json& j, const std::vector<std::string>& allowed,
                 const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double number_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(where + " requires numeric '" + key + "'");
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + "." + key + " is not finite");
  return v;
}

int int_at(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ConfigError(where + " requires integer '" + key + "'");
  }
  return j.at(key).get<int>();
}

Eigen::Vector2d point_at(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError(where + " must be a [x, y] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

GeometrySpec parse_geometry(const json& j, const std::string& where) {
  GeometrySpec g;
  const std::string type = j.value("type", std::string{});
  if (type == "rectangle") {
    expect_keys(j, {"type", "width", "height", "nx", "ny", "order", "offset"}, where);
    g.kind = GeometrySpec::Kind::rectangle;
    g.width = number_at(j, "width", where);
    g.height = number_at(j, "height", where);
    g.nx = int_at(j, "nx", where);
    g.ny = int_at(j, "ny", where);
  } else if (type == "right_triangle") {
    expect_keys(j, {"type", "base", "height", "n", "order", "offset"}, where);
    g.kind = GeometrySpec::Kind::right_triangle;
    g.base = number_at(j, "base", where);
    g.height = number_at(j, "height", where);
    g.n = int_at(j, "n", where);
  } else {
    throw ConfigError(where + ".type must be 'rectangle' or 'right_triangle'");
  }
  g.order = int_at(j, "order", where);
  if (j.contains("offset")) g.offset = point_at(j.at("offset"), where + ".offset");
  return g;
}

Material parse_material(const json& j, const std::string& where) {
  expect_keys(j, {"youngs_modulus", "poisson_ratio", "density", "thickness"}, where);
  Material m;
  m.youngs_modulus = number_at(j, "youngs_modulus", where);
  m.poisson_ratio = number_at(j, "poisson_ratio", where);
  m.density = number_at(j, "density", where);
  m.thickness = number_at(j, "thickness", where);
  m.validate();
  return m;
}

ComponentConfig parse_component(const json& j, const std::string& where) {
  expect_keys(j, {"id", "geometry", "material", "modal_damping", "fixed_boxes"}, where);
  ComponentConfig c;
  if (!j.contains("id") || !j.at("id").is_string()) {
    throw ConfigError(where + " requires string 'id'");
  }
  c.id = j.at("id").get<std::string>();
  if (!j.contains("geometry") || !j.contains("material")) {
    throw ConfigError(where + " requires 'geometry' and 'material'");
  }
  c.geometry = parse_geometry(j.at("geometry"), where + ".geometry");
  c.material = parse_material(j.at("material"), where + ".material");
  c.modal_damping = j.contains("modal_damping") ? number_at(j, "modal_damping", where) : 0.0;
  if (j.contains("fixed_boxes")) {
    for (const json& jb : j.at("fixed_boxes")) {
      expect_keys(jb, {"min", "max"}, where + ".fixed_boxes[]");
      BoxSpec box;
      box.min = point_at(jb.at("min"), where + ".fixed_boxes[].min");
      box.max = point_at(jb.at("max"), where + ".fixed_boxes[].max");
      c.fixed_boxes.push_back(box);
    }
  }
  return c;
}

DofSelector parse_selector(const json& j, const std::string& where) {
  DofSelector s;
  if (j.contains("point")) {
    expect_keys(j, {"point", "dir"}, where);
    s.kind = DofSelector::Kind::point;
    s.point = point_at(j.at("point"), where + ".point");
    const std::string dir = j.value("dir", std::string{});
    if (dir == "x") {
      s.direction = 0;
    } else if (dir == "y") {
      s.direction = 1;
    } else {
      throw ConfigError(where + ".dir must be 'x' or 'y'");
    }
  } else if (j.contains("rotation_pair")) {
    expect_keys(j, {"rotation_pair"}, where);
    const json& jp = j.at("rotation_pair");
    if (!jp.is_array() || jp.size() != 2) {
      throw ConfigError(where + ".rotation_pair must hold two [x, y] points");
    }
    s.kind = DofSelector::Kind::rotation_pair;
    s.pair_a = point_at(jp[0], where + ".rotation_pair[0]");
    s.pair_b = point_at(jp[1], where + ".rotation_pair[1]");
  } else {
    throw ConfigError(where + " must contain 'point' or 'rotation_pair'");
  }
  return s;
}

}  // namespace

FrequencyGrid GridSpec::build() const {
  if (spacing == "linear") return FrequencyGrid::linear_hz(f_max_hz, n_points);
  if (spacing == "log") return FrequencyGrid::log_hz(f_min_hz, f_max_hz, n_points);
  throw ConfigError("grid.spacing must be 'linear' or 'log'");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  expect_keys(j,
              {"components", "interconnection", "grid", "gamma", "reference_multiplier",
               "methods", "seed", "synthesis"},
              "run config");
  RunConfig cfg;

  if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty()) {
    throw ConfigError("run config requires a non-empty 'components' array");
  }
  const fs::path base = fs::path(path).parent_path();
  for (const json& jc : j.at("components")) {
    if (jc.is_object() && jc.contains("path")) {
      expect_keys(jc, {"path"}, "components[]");
      const fs::path comp_path = base / jc.at("path").get<std::string>();
      std::ifstream cin(comp_path);
      if (!cin) throw ConfigError("cannot open component config '" + comp_path.string() + "'");
      json cj;
      try {
        cin >> cj;
      } catch (const std::exception& e) {
        throw ConfigError("cannot parse '" + comp_path.string() + "': " + e.what());
      }
      cfg.components.push_back(parse_component(cj, "component '" + comp_path.string() + "'"));
    } else {
      cfg.components.push_back(parse_component(jc, "components[]"));
    }
  }

  if (!j.contains("interconnection")) throw ConfigError("run config requires 'interconnection'");
  const json& ji = j.at("interconnection");
  expect_keys(ji, {"springs", "external_inputs", "outputs"}, "interconnection");
  if (ji.contains("springs")) {
    for (const json& js : ji.at("springs")) {
      expect_keys(js, {"comp_a", "dof_a", "comp_b", "dof_b", "stiffness"}, "springs[]");
      SpringSpec s;
      s.comp_a = js.value("comp_a", std::string{});
      s.comp_b = js.value("comp_b", std::string{});
      s.dof_a = parse_selector(js.at("dof_a"), "springs[].dof_a");
      s.dof_b = parse_selector(js.at("dof_b"), "springs[].dof_b");
      s.stiffness = number_at(js, "stiffness", "springs[]");
      if (!(s.stiffness > 0.0)) throw ConfigError("spring stiffness must be positive");
      cfg.springs.push_back(std::move(s));
    }
  }
  auto parse_ports = [&](const char* key, std::vector<PortSpec>& out) {
    if (!ji.contains(key)) return;
    for (const json& jp : ji.at(key)) {
      expect_keys(jp, {"comp", "dof"}, std::string(key) + "[]");
      PortSpec p;
      p.comp = jp.value("comp", std::string{});
      p.dof = parse_selector(jp.at("dof"), std::string(key) + "[].dof");
      out.push_back(std::move(p));
    }
  };
  parse_ports("external_inputs", cfg.external_inputs);
  parse_ports("outputs", cfg.outputs);
  if (cfg.external_inputs.empty() || cfg.outputs.empty()) {
    throw ConfigError("interconnection requires external inputs and outputs");
  }

  if (!j.contains("grid")) throw ConfigError("run config requires 'grid'");
  const json& jg = j.at("grid");
  expect_keys(jg, {"f_max_hz", "n_points", "spacing", "f_min_hz"}, "grid");
  cfg.grid.f_max_hz = number_at(jg, "f_max_hz", "grid");
  cfg.grid.n_points = int_at(jg, "n_points", "grid");
  cfg.grid.spacing = jg.value("spacing", std::string("linear"));
  if (jg.contains("f_min_hz")) cfg.grid.f_min_hz = number_at(jg, "f_min_hz", "grid");

  cfg.gamma = number_at(j, "gamma", "run config");
  if (j.contains("reference_multiplier")) {
    cfg.reference_multiplier = number_at(j, "reference_multiplier", "run config");
  }
  if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
    throw ConfigError("run config requires a non-empty 'methods' array");
  }
  for (const json& jm : j.at("methods")) {
    const std::string m = jm.get<std::string>();
    if (m != "proposed" && m != "standard-1" && m != "standard-2" && m != "standard-3") {
      throw ConfigError("unknown method '" + m + "'");
    }
    cfg.methods.push_back(m);
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("synthesis")) {
    const json& js = j.at("synthesis");
    expect_keys(js,
                {"weight_cap", "sdp_tol", "alternation_tol", "alternation_max_rounds",
                 "golden_section_iters"},
                "synthesis");
    if (js.contains("weight_cap")) cfg.synthesis.weight_cap = number_at(js, "weight_cap", "synthesis");
    if (js.contains("sdp_tol")) cfg.synthesis.sdp_tol = number_at(js, "sdp_tol", "synthesis");
    if (js.contains("alternation_tol")) {
      cfg.synthesis.alternation_tol = number_at(js, "alternation_tol", "synthesis");
    }
    if (js.contains("alternation_max_rounds")) {
      cfg.synthesis.alternation_max_rounds = int_at(js, "alternation_max_rounds", "synthesis");
    }
    if (js.contains("golden_section_iters")) {
      cfg.synthesis.golden_section_iters = int_at(js, "golden_section_iters", "synthesis");
    }
  }
  return cfg;
}

namespace {

struct ChannelVectors {
  std::vector<Eigen::VectorXd> u;  // channel force shapes (B columns)
  std::vector<Eigen::VectorXd> y;  // channel measurement shapes (F rows)
};

struct BuiltComponent {
  std::string id;
  Mesh2D mesh;
  SecondOrderModel model;               // constrained + damped, no channels yet
  std::vector<Eigen::Index> dof_map;    // original DOF -> constrained index (-1 fixed)
  ChannelVectors channels;
};

Eigen::VectorXd selector_vector(const BuiltComponent& comp, const DofSelector& sel,
                                const std::string& where) {
  const Eigen::Index n = comp.model.dof_count();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  auto resolve = [&](const Eigen::Vector2d& point, int dir) {
    const int node = nearest_node(comp.mesh, point);
    const Eigen::Index dof = comp.dof_map[static_cast<size_t>(2 * node + dir)];
    if (dof < 0) {
      throw ConfigError(where + ": selected DOF on '" + comp.id + "' is fixed");
    }
    return dof;
  };
  if (sel.kind == DofSelector::Kind::point) {
    v(resolve(sel.point, sel.direction)) = 1.0;
  } else {
    const int node_a = nearest_node(comp.mesh, sel.pair_a);
    const int node_b = nearest_node(comp.mesh, sel.pair_b);
    const double dx = comp.mesh.nodes[static_cast<size_t>(node_b)].x() -
                      comp.mesh.nodes[static_cast<size_t>(node_a)].x();
    if (std::abs(dx) < 1e-12) {
      throw ConfigError(where + ": rotation pair needs horizontally separated markers");
    }
    // finite-difference rotation: theta ~ (uy(b) - uy(a)) / dx; the conjugate
    // moment applies the equal-and-opposite vertical force pair
    v(resolve(sel.pair_a, 1)) = -1.0 / dx;
    v(resolve(sel.pair_b, 1)) = 1.0 / dx;
  }
  return v;
}

}  // namespace

BuiltAssembly build_assembly(const RunConfig& config) {
  std::vector<BuiltComponent> built;
  std::set<std::string> ids;
  for (const ComponentConfig& cc : config.components) {
    if (!ids.insert(cc.id).second) throw ConfigError("duplicate component id '" + cc.id + "'");
    BuiltComponent bc;
    bc.id = cc.id;
    switch (cc.geometry.kind) {
      case GeometrySpec::Kind::rectangle:
        bc.mesh = translate(mesh_rectangle(cc.geometry.width, cc.geometry.height,
                                           cc.geometry.nx, cc.geometry.ny, cc.geometry.order),
                            cc.geometry.offset);
        break;
      case GeometrySpec::Kind::right_triangle:
        bc.mesh = translate(mesh_right_triangle(cc.geometry.base, cc.geometry.height,
                                                cc.geometry.n, cc.geometry.order),
                            cc.geometry.offset);
        break;
    }
    SecondOrderModel model = assemble_plane_stress(bc.mesh, cc.material);
    std::vector<Eigen::Index> fixed;
    for (const BoxSpec& box : cc.fixed_boxes) {
      for (int node : nodes_in_box(bc.mesh, box.min, box.max)) {
        fixed.push_back(2 * node);
        fixed.push_back(2 * node + 1);
      }
    }
    std::sort(fixed.begin(), fixed.end());
    fixed.erase(std::unique(fixed.begin(), fixed.end()), fixed.end());
    bc.dof_map.assign(static_cast<size_t>(model.dof_count()), -1);
    {
      Eigen::Index next = 0;
      size_t fi = 0;
      for (Eigen::Index d = 0; d < model.dof_count(); ++d) {
        if (fi < fixed.size() && fixed[fi] == d) {
          ++fi;
          continue;
        }
        bc.dof_map[static_cast<size_t>(d)] = next++;
      }
    }
    model = apply_dirichlet(model, fixed);
    bc.model = apply_modal_damping(model, cc.modal_damping);
    built.push_back(std::move(bc));
  }

  auto find_comp = [&](const std::string& id, const std::string& where) -> BuiltComponent& {
    for (BuiltComponent& bc : built) {
      if (bc.id == id) return bc;
    }
    throw ConfigError(where + ": unknown component '" + id + "'");
  };

  // expand records into channels, in record order
  struct SpringChannels {
    size_t comp_a, u_a, y_a;
    size_t comp_b, u_b, y_b;
    double stiffness;
  };
  std::vector<SpringChannels> spring_channels;
  auto comp_index = [&](const std::string& id, const std::string& where) {
    for (size_t i = 0; i < built.size(); ++i) {
      if (built[i].id == id) return i;
    }
    throw ConfigError(where + ": unknown component '" + id + "'");
  };
  for (size_t si = 0; si < config.springs.size(); ++si) {
    const SpringSpec& s = config.springs[si];
    const std::string where = "spring " + std::to_string(si);
    const size_t ia = comp_index(s.comp_a, where);
    const size_t ib = comp_index(s.comp_b, where);
    const Eigen::VectorXd va = selector_vector(built[ia], s.dof_a, where);
    const Eigen::VectorXd vb = selector_vector(built[ib], s.dof_b, where);
    SpringChannels sc;
    sc.comp_a = ia;
    sc.u_a = built[ia].channels.u.size();
    sc.y_a = built[ia].channels.y.size();
    built[ia].channels.u.push_back(va);
    built[ia].channels.y.push_back(va);
    sc.comp_b = ib;
    sc.u_b = built[ib].channels.u.size();
    sc.y_b = built[ib].channels.y.size();
    built[ib].channels.u.push_back(vb);
    built[ib].channels.y.push_back(vb);
    sc.stiffness = s.stiffness;
    spring_channels.push_back(sc);
  }
  struct PortChannel {
    size_t comp;
    size_t channel;
  };
  std::vector<PortChannel> input_channels;
  for (size_t pi = 0; pi < config.external_inputs.size(); ++pi) {
    const PortSpec& p = config.external_inputs[pi];
    const std::string where = "external input " + std::to_string(pi);
    const size_t ic = comp_index(p.comp, where);
    const Eigen::VectorXd v = selector_vector(built[ic], p.dof, where);
    input_channels.push_back({ic, built[ic].channels.u.size()});
    built[ic].channels.u.push_back(v);
  }
  std::vector<PortChannel> output_channels;
  for (size_t pi = 0; pi < config.outputs.size(); ++pi) {
    const PortSpec& p = config.outputs[pi];
    const std::string where = "output " + std::to_string(pi);
    const size_t ic = comp_index(p.comp, where);
    const Eigen::VectorXd v = selector_vector(built[ic], p.dof, where);
    output_channels.push_back({ic, built[ic].channels.y.size()});
    built[ic].channels.y.push_back(v);
  }

  // channel offsets
  std::vector<Eigen::Index> u_offset(built.size(), 0);
  std::vector<Eigen::Index> y_offset(built.size(), 0);
  Eigen::Index m_b = 0;
  Eigen::Index p_b = 0;
  for (size_t i = 0; i < built.size(); ++i) {
    u_offset[i] = m_b;
    y_offset[i] = p_b;
    m_b += static_cast<Eigen::Index>(built[i].channels.u.size());
    p_b += static_cast<Eigen::Index>(built[i].channels.y.size());
  }
  const Eigen::Index m_c = static_cast<Eigen::Index>(input_channels.size());
  const Eigen::Index p_c = static_cast<Eigen::Index>(output_channels.size());

  BuiltAssembly out;
  out.coupling.k_bb = Eigen::MatrixXd::Zero(m_b, p_b);
  out.coupling.k_bc = Eigen::MatrixXd::Zero(m_b, m_c);
  out.coupling.k_cb = Eigen::MatrixXd::Zero(p_c, p_b);
  for (const SpringChannels& sc : spring_channels) {
    const Eigen::Index ua = u_offset[sc.comp_a] + static_cast<Eigen::Index>(sc.u_a);
    const Eigen::Index ya = y_offset[sc.comp_a] + static_cast<Eigen::Index>(sc.y_a);
    const Eigen::Index ub = u_offset[sc.comp_b] + static_cast<Eigen::Index>(sc.u_b);
    const Eigen::Index yb = y_offset[sc.comp_b] + static_cast<Eigen::Index>(sc.y_b);
    out.coupling.k_bb(ua, ya) -= sc.stiffness;
    out.coupling.k_bb(ua, yb) += sc.stiffness;
    out.coupling.k_bb(ub, ya) += sc.stiffness;
    out.coupling.k_bb(ub, yb) -= sc.stiffness;
  }
  for (size_t c = 0; c < input_channels.size(); ++c) {
    const Eigen::Index u = u_offset[input_channels[c].comp] +
                           static_cast<Eigen::Index>(input_channels[c].channel);
    out.coupling.k_bc(u, static_cast<Eigen::Index>(c)) = 1.0;
  }
  for (size_t c = 0; c < output_channels.size(); ++c) {
    const Eigen::Index y = y_offset[output_channels[c].comp] +
                           static_cast<Eigen::Index>(output_channels[c].channel);
    out.coupling.k_cb(static_cast<Eigen::Index>(c), y) = 1.0;
  }

  for (BuiltComponent& bc : built) {
    const Eigen::Index n = bc.model.dof_count();
    const Eigen::Index m_j = static_cast<Eigen::Index>(bc.channels.u.size());
    const Eigen::Index p_j = static_cast<Eigen::Index>(bc.channels.y.size());
    if (m_j == 0 && p_j == 0) {
      throw ConfigError("component '" + bc.id + "' has no interconnection channels");
    }
    AssemblyComponent ac;
    ac.id = bc.id;
    ac.model = bc.model;
    ac.model.input_map.resize(n, m_j);
    for (Eigen::Index c = 0; c < m_j; ++c) {
      ac.model.input_map.col(c) = bc.channels.u[static_cast<size_t>(c)];
    }
    ac.model.output_map.resize(p_j, n);
    for (Eigen::Index r = 0; r < p_j; ++r) {
      ac.model.output_map.row(r) = bc.channels.y[static_cast<size_t>(r)].transpose();
    }
    std::vector<Eigen::Index> boundary;
    for (Eigen::Index d = 0; d < n; ++d) {
      const bool in_b = ac.model.input_map.row(d).cwiseAbs().maxCoeff() != 0.0;
      const bool in_f = p_j > 0 && ac.model.output_map.col(d).cwiseAbs().maxCoeff() != 0.0;
      if (in_b || in_f) boundary.push_back(d);
    }
    ac.partition = DofPartition::from_boundary(n, std::move(boundary));
    out.coupling.signature.push_back({bc.id, m_j, p_j});
    out.components.push_back(std::move(ac));
  }

  out.coupling.validate();
  out.grid = config.grid.build();
  return out;
}

std::string write_demo_config(const std::string& dir) {
  fs::create_directories(dir);

  // massive machine bed clamped at both ends; the stage tower sits on three
  // vertical bearings near the left clamp, the z-stage hangs on the y-stage
  // through a stiff leaf-spring pair plus a soft rotational flexure
  const json frame = {
      {"id", "frame"},
      {"geometry",
       {{"type", "rectangle"}, {"width", 3.0}, {"height", 0.5}, {"nx", 30}, {"ny", 4},
        {"order", 2}, {"offset", {0.0, 0.0}}}},
      {"material",
       {{"youngs_modulus", 210.0e9}, {"poisson_ratio", 0.3}, {"density", 7800.0},
        {"thickness", 0.4}}},
      {"modal_damping", 0.01},
      {"fixed_boxes",
       {{{"min", {-1e-6, -1e-6}}, {"max", {1e-6, 0.5000001}}},
        {{"min", {2.999999, -1e-6}}, {"max", {3.000001, 0.5000001}}}}},
  };
  const json ystage = {
      {"id", "ystage"},
      {"geometry",
       {{"type", "right_triangle"}, {"base", 0.36}, {"height", 0.216}, {"n", 6}, {"order", 2},
        {"offset", {0.45, 0.5}}}},
      {"material",
       {{"youngs_modulus", 210.0e9}, {"poisson_ratio", 0.3}, {"density", 7800.0},
        {"thickness", 0.05}}},
      {"modal_damping", 0.01},
  };
  const json zstage = {
      {"id", "zstage"},
      {"geometry",
       {{"type", "right_triangle"}, {"base", 0.36}, {"height", 0.216}, {"n", 6}, {"order", 2},
        {"offset", {0.45, 0.746}}}},
      {"material",
       {{"youngs_modulus", 210.0e9}, {"poisson_ratio", 0.3}, {"density", 7800.0},
        {"thickness", 0.05}}},
      {"modal_damping", 0.01},
  };

  auto bearing = [](double x) {
    return json{{"comp_a", "frame"},
                {"dof_a", {{"point", {x, 0.5}}, {"dir", "y"}}},
                {"comp_b", "ystage"},
                {"dof_b", {{"point", {x, 0.5}}, {"dir", "y"}}},
                {"stiffness", 2.0e9}};
  };
  const json run = {
      {"components",
       {{{"path", "frame.json"}}, {{"path", "ystage.json"}}, {{"path", "zstage.json"}}}},
      {"interconnection",
       {{"springs",
         {bearing(0.45), bearing(0.6), bearing(0.75),
          {{"comp_a", "ystage"},
           {"dof_a", {{"point", {0.45, 0.716}}, {"dir", "x"}}},
           {"comp_b", "zstage"},
           {"dof_b", {{"point", {0.45, 0.746}}, {"dir", "x"}}},
           {"stiffness", 20.0e9}},
          {{"comp_a", "ystage"},
           {"dof_a", {{"point", {0.45, 0.716}}, {"dir", "y"}}},
           {"comp_b", "zstage"},
           {"dof_b", {{"point", {0.45, 0.746}}, {"dir", "y"}}},
           {"stiffness", 20.0e9}},
          {{"comp_a", "ystage"},
           {"dof_a", {{"rotation_pair", {{0.45, 0.5}, {0.75, 0.5}}}}},
           {"comp_b", "zstage"},
           {"dof_b", {{"rotation_pair", {{0.45, 0.746}, {0.75, 0.746}}}}},
           {"stiffness", 0.5e9}}}},
        {"external_inputs",
         {{{"comp", "ystage"}, {"dof", {{"point", {0.45, 0.59}}, {"dir", "x"}}}},
          {{"comp", "zstage"}, {"dof", {{"point", {0.45, 0.962}}, {"dir", "y"}}}}}},
        {"outputs",
         {{{"comp", "zstage"}, {"dof", {{"point", {0.75, 0.746}}, {"dir", "x"}}}},
          {{"comp", "zstage"}, {"dof", {{"point", {0.75, 0.746}}, {"dir", "y"}}}}}}}},
      {"grid", {{"f_max_hz", 2000.0}, {"n_points", 200}, {"spacing", "linear"}}},
      {"gamma", 0.05},
      {"reference_multiplier", 10.0},
      {"methods", {"standard-1", "standard-2", "standard-3", "proposed"}},
      {"seed", 20260808},
  };

  auto dump = [&](const std::string& name, const json& j) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write demo config '" + name + "'");
    out << j.dump(1) << "\n";
  };
  dump("frame.json", frame);
  dump("ystage.json", ystage);
  dump("zstage.json", zstage);
  dump("run.json", run);
  return (fs::path(dir) / "run.json").string();
}

}  // namespace cmsbudget
