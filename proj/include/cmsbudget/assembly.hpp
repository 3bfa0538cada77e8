#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cmsbudget/model.hpp"

namespace cmsbudget {

struct ComponentSignature {
  std::string id;
  Eigen::Index inputs = 0;   // m_j
  Eigen::Index outputs = 0;  // p_j
};

/// Static coupling map
///   [u_b; y_c] = [K_bb K_bc; K_cb O] [y_b; u_c].
struct Interconnection {
  Eigen::MatrixXd k_bb;  // m_b x p_b
  Eigen::MatrixXd k_bc;  // m_b x m_c
  Eigen::MatrixXd k_cb;  // p_c x p_b
  std::vector<ComponentSignature> signature;

  Eigen::Index m_b() const { return k_bb.rows(); }
  Eigen::Index p_b() const { return k_bb.cols(); }
  Eigen::Index m_c() const { return k_bc.cols(); }
  Eigen::Index p_c() const { return k_cb.rows(); }
  void validate() const;
};

struct AssemblyComponent {
  std::string id;
  SecondOrderModel model;
  DofPartition partition;
};

struct AssemblyModel {
  std::vector<AssemblyComponent> components;
  Interconnection coupling;
  FrequencyGrid grid;

  void validate() const;
};

using WarningSink = std::function<void(const std::string&)>;

/// H_c = K_cb H_b (I - K_bb H_b)^-1 K_bc with H_b = blockdiag of the given
/// component FRFs. Parallel over frequencies; serial reference kept for tests.
FrfSamples coupled_frf(const Interconnection& coupling,
                       const std::vector<FrfSamples>& component_frfs);
FrfSamples coupled_frf_serial(const Interconnection& coupling,
                              const std::vector<FrfSamples>& component_frfs);
FrfSamples coupled_frf(const AssemblyModel& assembly);

/// Oracle: one monolithic second-order model with the coupling springs
/// assembled into the stiffness matrix; its FRF equals coupled_frf.
SecondOrderModel monolithic_assemble(const AssemblyModel& assembly,
                                     const WarningSink& warn = {});

/// E_c(iw) = H_c_reduced - H_c_full, pointwise.
ErrorSamples assembly_error(const FrfSamples& full, const FrfSamples& reduced);

/// N(iw) = [K_bb (I - H_b K_bb)^-1, (I - K_bb H_b)^-1 K_bc;
///          K_cb (I - H_b K_bb)^-1, O], from high-order component FRFs only.
FrfSamples interconnection_transfer(const Interconnection& coupling,
                                    const std::vector<FrfSamples>& component_frfs);
FrfSamples interconnection_transfer_serial(const Interconnection& coupling,
                                           const std::vector<FrfSamples>& component_frfs);

}  // namespace cmsbudget
