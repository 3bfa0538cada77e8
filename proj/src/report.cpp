#include "cmsbudget/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cmsbudget/errors.hpp"

namespace cmsbudget {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_budgets_csv(const ComponentBudget& budget, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "f_hz,component,channel,w_value,v_value,d_value,lmi_min_eig\n";
  for (Eigen::Index i = 0; i < budget.grid.size(); ++i) {
    const std::string f = format_double(budget.grid.hz(i));
    for (Eigen::Index j = 0; j < budget.component_count(); ++j) {
      const Eigen::VectorXd& w = budget.w[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const Eigen::VectorXd& v = budget.v[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const Eigen::Index channels = std::max(w.size(), v.size());
      for (Eigen::Index c = 0; c < channels; ++c) {
        out << f << ',' << budget.signature[static_cast<size_t>(j)].id << ',' << c << ',';
        if (c < w.size()) out << format_double(w(c));
        out << ',';
        if (c < v.size()) out << format_double(v(c));
        out << ',' << format_double(budget.d[static_cast<size_t>(i)](j)) << ','
            << format_double(budget.lmi_min_eig[static_cast<size_t>(i)]) << '\n';
      }
    }
  }
}

ComponentBudget read_budgets_csv(const std::string& path, const FrequencyGrid& expected_grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open budgets file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "f_hz,component,channel,w_value,v_value,d_value,lmi_min_eig") {
    throw ConfigError("'" + path + "' is not a budgets.csv file");
  }
  // gather rows grouped by (frequency order, component order of first appearance)
  struct Row {
    double f_hz;
    std::string comp;
    Eigen::Index channel;
    bool has_w, has_v;
    double w, v, d, min_eig;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7) throw ConfigError("malformed budgets.csv row");
    Row r;
    r.f_hz = std::stod(f[0]);
    r.comp = f[1];
    r.channel = std::stol(f[2]);
    r.has_w = !f[3].empty();
    r.w = r.has_w ? std::stod(f[3]) : 0.0;
    r.has_v = !f[4].empty();
    r.v = r.has_v ? std::stod(f[4]) : 0.0;
    r.d = std::stod(f[5]);
    r.min_eig = std::stod(f[6]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("budgets.csv contains no data");

  // frequency slots in file order
  std::vector<double> f_values;
  for (const Row& r : rows) {
    if (f_values.empty() || f_values.back() != r.f_hz) f_values.push_back(r.f_hz);
  }
  if (static_cast<Eigen::Index>(f_values.size()) != expected_grid.size()) {
    throw ConfigError("budgets.csv grid size does not match the configured grid");
  }
  for (size_t i = 0; i < f_values.size(); ++i) {
    const double expected = expected_grid.hz(static_cast<Eigen::Index>(i));
    if (std::abs(f_values[i] - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      throw ConfigError("budgets.csv frequencies do not match the configured grid");
    }
  }

  // component order and channel counts from the first frequency block
  std::vector<std::string> comp_order;
  std::map<std::string, Eigen::Index> p_count;
  std::map<std::string, Eigen::Index> m_count;
  for (const Row& r : rows) {
    if (r.f_hz != rows[0].f_hz) break;
    if (comp_order.empty() || comp_order.back() != r.comp) {
      if (std::find(comp_order.begin(), comp_order.end(), r.comp) != comp_order.end()) {
        throw ConfigError("budgets.csv component blocks are not contiguous");
      }
      comp_order.push_back(r.comp);
    }
    if (r.has_w) p_count[r.comp] = std::max(p_count[r.comp], r.channel + 1);
    if (r.has_v) m_count[r.comp] = std::max(m_count[r.comp], r.channel + 1);
  }

  ComponentBudget budget;
  budget.grid = expected_grid;
  for (const std::string& id : comp_order) {
    budget.signature.push_back({id, m_count[id], p_count[id]});
  }
  const size_t k = comp_order.size();
  const size_t nf = f_values.size();
  budget.w.assign(nf, std::vector<Eigen::VectorXd>(k));
  budget.v.assign(nf, std::vector<Eigen::VectorXd>(k));
  budget.d.assign(nf, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(k)));
  budget.d_c.assign(nf, 1.0);
  budget.lmi_min_eig.assign(nf, 0.0);
  budget.objective.assign(nf, 0.0);
  for (size_t i = 0; i < nf; ++i) {
    for (size_t j = 0; j < k; ++j) {
      budget.w[i][j] = Eigen::VectorXd::Zero(p_count[comp_order[j]]);
      budget.v[i][j] = Eigen::VectorXd::Zero(m_count[comp_order[j]]);
    }
  }
  size_t fi = 0;
  for (const Row& r : rows) {
    if (r.f_hz != f_values[fi]) {
      ++fi;
      if (fi >= nf || r.f_hz != f_values[fi]) throw ConfigError("budgets.csv rows out of order");
    }
    const auto it = std::find(comp_order.begin(), comp_order.end(), r.comp);
    if (it == comp_order.end()) throw ConfigError("budgets.csv has inconsistent components");
    const size_t j = static_cast<size_t>(it - comp_order.begin());
    if (r.has_w) budget.w[fi][j](r.channel) = r.w;
    if (r.has_v) budget.v[fi][j](r.channel) = r.v;
    budget.d[fi](static_cast<Eigen::Index>(j)) = r.d;
    budget.lmi_min_eig[fi] = r.min_eig;
  }
  for (size_t i = 0; i < nf; ++i) {
    for (size_t j = 0; j < k; ++j) {
      if ((budget.w[i][j].array() <= 0.0).any() || (budget.v[i][j].array() <= 0.0).any()) {
        throw ConfigError("budgets.csv is missing weight entries");
      }
    }
  }
  return budget;
}

void write_sensitivity_csv(const SensitivityCurve& sens,
                           const std::vector<ComponentSignature>& signature,
                           const std::string& path) {
  std::ofstream out = open_out(path);
  out << "f_hz,component,sensitivity\n";
  for (Eigen::Index i = 0; i < sens.grid.size(); ++i) {
    for (size_t j = 0; j < sens.values[static_cast<size_t>(i)].size(); ++j) {
      out << format_double(sens.grid.hz(i)) << ',' << signature[j].id << ','
          << format_double(sens.values[static_cast<size_t>(i)][j]) << '\n';
    }
  }
}

void write_summary_csv(const std::vector<PlanEvaluation>& plans, const ReferenceSet& reference,
                       const std::string& path) {
  std::ofstream out = open_out(path);
  out << "method,component,f_cut_hz,n_hat,requirement_ok\n";
  out << "reference";
  out << ",ASSEMBLY," << format_double(10.0 * reference.f_max_hz) << ',';
  int ref_total = 0;
  for (const auto& rc : reference.components) ref_total += rc.n_hat;
  out << ref_total << ",1\n";
  for (const auto& rc : reference.components) {
    out << "reference," << rc.id << ',' << format_double(rc.f_cut_hz) << ',' << rc.n_hat
        << ",1\n";
  }
  for (const auto& pe : plans) {
    out << pe.plan.method << ",ASSEMBLY,," << pe.plan.total_n_hat << ','
        << (pe.plan.assembly_ok ? 1 : 0) << '\n';
    for (const auto& comp : pe.plan.components) {
      out << pe.plan.method << ',' << comp.id << ',' << format_double(comp.f_cut_hz) << ','
          << comp.n_hat << ',' << (comp.requirement_ok ? 1 : 0) << '\n';
    }
  }
}

void write_frf_csv(const std::vector<PlanEvaluation>& plans, const ReferenceSet& reference,
                   const std::string& path) {
  std::ofstream out = open_out(path);
  out << "f_hz,method,out,in,magnitude\n";
  auto emit = [&](const std::string& method, const FrfSamples& frf) {
    for (Eigen::Index i = 0; i < frf.grid.size(); ++i) {
      const Eigen::MatrixXcd& h = frf.values[static_cast<size_t>(i)];
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
          out << format_double(frf.grid.hz(i)) << ',' << method << ',' << r << ',' << c << ','
              << format_double(std::abs(h(r, c))) << '\n';
        }
      }
    }
  };
  emit("reference", reference.h_c);
  for (const auto& pe : plans) emit(pe.plan.method, pe.h_c_hat);
}

ReportTables write_relerr_csv(const std::vector<PlanEvaluation>& plans,
                              const ReferenceSet& reference, double gamma,
                              const std::string& path) {
  ReportTables tables;
  std::ofstream out = open_out(path);
  out << "f_hz,method,rel_error,gamma\n";
  for (const auto& pe : plans) {
    tables.methods.push_back(pe.plan.method);
    std::vector<double> rel;
    for (Eigen::Index i = 0; i < reference.grid.size(); ++i) {
      const double h_norm = spectral_norm(reference.h_c.values[static_cast<size_t>(i)]);
      const double e_norm = spectral_norm(pe.e_c.values[static_cast<size_t>(i)]);
      const double value = e_norm / h_norm;
      rel.push_back(value);
      out << format_double(reference.grid.hz(i)) << ',' << pe.plan.method << ','
          << format_double(value) << ',' << format_double(gamma) << '\n';
    }
    tables.relative_error.push_back(std::move(rel));
  }
  return tables;
}

void write_report_txt(const std::vector<PlanEvaluation>& plans, const ReferenceSet& reference,
                      const ComponentBudget& budget, double gamma, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "Assembly-aware component reduction report\n";
  out << "==========================================\n";
  out << "gamma (max relative error): " << format_double(gamma) << "\n";
  out << "f_max: " << format_double(reference.f_max_hz) << " Hz, grid points: "
      << reference.grid.size() << "\n";
  if (budget.cap_active) {
    out << "note: the weight cap (1e6) was active on at least one channel\n";
  }
  out << "\n";

  char line[512];
  std::snprintf(line, sizeof(line), "%-14s", "model");
  out << line;
  for (const auto& rc : reference.components) {
    std::snprintf(line, sizeof(line), " | %-10s f_cut[Hz] n_hat ok", rc.id.c_str());
    out << line;
  }
  out << " | total ok\n";

  auto emit_row = [&](const std::string& name, const std::vector<ComponentPlanEntry>& comps,
                      int total, bool ok) {
    std::snprintf(line, sizeof(line), "%-14s", name.c_str());
    out << line;
    for (const auto& c : comps) {
      std::snprintf(line, sizeof(line), " | %10s %9.0f %5d %2s", "", c.f_cut_hz, c.n_hat,
                    c.requirement_ok ? "y" : "n");
      out << line;
    }
    std::snprintf(line, sizeof(line), " | %5d %2s\n", total, ok ? "y" : "n");
    out << line;
  };

  std::vector<ComponentPlanEntry> ref_entries;
  int ref_total = 0;
  for (const auto& rc : reference.components) {
    ComponentPlanEntry e;
    e.id = rc.id;
    e.f_cut_hz = rc.f_cut_hz;
    e.n_hat = rc.n_hat;
    e.requirement_ok = true;
    ref_entries.push_back(e);
    ref_total += rc.n_hat;
  }
  emit_row("reference", ref_entries, ref_total, true);
  for (const auto& pe : plans) {
    emit_row(pe.plan.method, pe.plan.components, pe.plan.total_n_hat, pe.plan.assembly_ok);
  }
  out << "\nColumns per component: implied cut-off frequency, reduced dimension,\n"
         "component requirement satisfied. Final columns: assembly dimension and\n"
         "assembly requirement satisfied.\n";
}

}  // namespace cmsbudget
