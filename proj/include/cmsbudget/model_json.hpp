#pragma once

#include <optional>
#include <string>

#include "cmsbudget/model.hpp"

#include "json.hpp"

namespace cmsbudget {

/// Optional reduction provenance carried by exported models.
struct ModelProvenance {
  std::string component_id;
  double f_cut_hz = 0.0;
  int n_hat = 0;
};

struct ImportedModel {
  SecondOrderModel model;
  DofPartition partition;
  std::optional<ModelProvenance> provenance;
};

/// Serializes a model (and its boundary set) to the dense JSON matrix format:
/// {"n", "mass", "damping" | {"modal_zeta"}, "stiffness", "B", "F",
///  "boundary", ["dof_labels"], ["provenance"]}.
nlohmann::json model_to_json(const SecondOrderModel& model, const DofPartition& partition,
                             const std::optional<ModelProvenance>& provenance = {});

ImportedModel model_from_json(const nlohmann::json& j);

ImportedModel load_model_file(const std::string& path);
void save_model_file(const std::string& path, const SecondOrderModel& model,
                     const DofPartition& partition,
                     const std::optional<ModelProvenance>& provenance = {});

}  // namespace cmsbudget
