#include "cmsbudget/model_json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name,
                                 Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ConfigError("'" + name + "' must be a dense array of " + std::to_string(rows) +
                      " rows");
  }
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError("'" + name + "' row " + std::to_string(r) + " must have " +
                        std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<size_t>(c)];
      if (!v.is_number()) throw ConfigError("'" + name + "' entry is not a number");
      a(r, c) = v.get<double>();
      if (!std::isfinite(a(r, c))) throw ConfigError("'" + name + "' entry is not finite");
    }
  }
  return a;
}

void expect_keys(const json& j, const std::vector<std::string>& allowed,
                 const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

json model_to_json(const SecondOrderModel& model, const DofPartition& partition,
                   const std::optional<ModelProvenance>& provenance) {
  json j;
  j["n"] = model.dof_count();
  j["mass"] = matrix_to_json(model.mass);
  j["damping"] = matrix_to_json(model.damping);
  j["stiffness"] = matrix_to_json(model.stiffness);
  j["B"] = matrix_to_json(model.input_map);
  j["F"] = matrix_to_json(model.output_map);
  j["boundary"] = partition.boundary_indices;
  if (!model.dof_labels.empty()) j["dof_labels"] = model.dof_labels;
  if (provenance) {
    j["provenance"] = {{"component_id", provenance->component_id},
                       {"f_cut_hz", provenance->f_cut_hz},
                       {"n_hat", provenance->n_hat}};
  }
  return j;
}

ImportedModel model_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("model document must be a JSON object");
  expect_keys(j, {"n", "mass", "damping", "stiffness", "B", "F", "boundary", "dof_labels",
                  "provenance"},
              "model document");
  for (const char* key : {"n", "mass", "stiffness", "B", "F", "boundary"}) {
    if (!j.contains(key)) throw ConfigError(std::string("model document missing '") + key + "'");
  }
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  if (n < 0) throw ConfigError("'n' must be non-negative");

  ImportedModel out;
  out.model.mass = matrix_from_json(j.at("mass"), "mass", n, n);
  out.model.stiffness = matrix_from_json(j.at("stiffness"), "stiffness", n, n);
  const json& jb = j.at("B");
  const Eigen::Index m = (n > 0 && jb.is_array() && !jb.empty())
                             ? static_cast<Eigen::Index>(jb[0].size())
                             : 0;
  out.model.input_map = n > 0 ? matrix_from_json(jb, "B", n, m) : Eigen::MatrixXd(0, 0);
  const json& jf = j.at("F");
  const Eigen::Index p = static_cast<Eigen::Index>(jf.size());
  out.model.output_map = matrix_from_json(jf, "F", p, n);

  bool modal_damping = false;
  double zeta = 0.0;
  if (j.contains("damping")) {
    const json& jc = j.at("damping");
    if (jc.is_object()) {
      expect_keys(jc, {"modal_zeta"}, "damping");
      zeta = jc.at("modal_zeta").get<double>();
      modal_damping = true;
      out.model.damping = Eigen::MatrixXd::Zero(n, n);
    } else {
      out.model.damping = matrix_from_json(jc, "damping", n, n);
    }
  } else {
    out.model.damping = Eigen::MatrixXd::Zero(n, n);
  }

  if (j.contains("dof_labels")) {
    out.model.dof_labels = j.at("dof_labels").get<std::vector<std::string>>();
  }

  std::vector<Eigen::Index> boundary = j.at("boundary").get<std::vector<Eigen::Index>>();
  out.partition = DofPartition::from_boundary(n, std::move(boundary));

  if (j.contains("provenance")) {
    const json& jp = j.at("provenance");
    expect_keys(jp, {"component_id", "f_cut_hz", "n_hat"}, "provenance");
    ModelProvenance prov;
    prov.component_id = jp.value("component_id", std::string{});
    prov.f_cut_hz = jp.value("f_cut_hz", 0.0);
    prov.n_hat = jp.value("n_hat", 0);
    out.provenance = prov;
  }

  out.model.validate();
  if (modal_damping) out.model = apply_modal_damping(out.model, zeta);
  return out;
}

ImportedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

void save_model_file(const std::string& path, const SecondOrderModel& model,
                     const DofPartition& partition,
                     const std::optional<ModelProvenance>& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file '" + path + "'");
  out << model_to_json(model, partition, provenance).dump(1) << "\n";
}

}  // namespace cmsbudget
