#include "entsense/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace entsense {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

SchemeConfig parse_scheme_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key=value, got: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  SchemeConfig cfg;
  if (auto it = kv.find("scheme"); it != kv.end()) {
    if (it->second == "entangled") cfg.params.kind = Scheme::entangled;
    else if (it->second == "separable") cfg.params.kind = Scheme::separable;
    else throw std::invalid_argument("config: scheme must be `entangled` or `separable`");
  }
  if (auto it = kv.find("M"); it != kv.end()) cfg.params.M = std::stoi(it->second);
  if (auto it = kv.find("N"); it != kv.end()) cfg.params.N = std::stod(it->second);
  if (auto it = kv.find("eta"); it != kv.end()) cfg.params.eta = std::stod(it->second);
  if (auto it = kv.find("mu"); it != kv.end()) cfg.params.mu = std::stod(it->second);
  cfg.phis = Eigen::VectorXd::Zero(cfg.params.M);
  if (auto it = kv.find("phis"); it != kv.end()) {
    std::stringstream ss(it->second);
    std::string cell;
    std::vector<double> phis;
    while (std::getline(ss, cell, ',')) phis.push_back(std::stod(trim(cell)));
    if (int(phis.size()) != cfg.params.M)
      throw std::invalid_argument("config: phis must list one angle per node");
    for (int i = 0; i < cfg.params.M; ++i) cfg.phis(i) = phis[i];
  }
  return cfg;
}

std::string analysis_report_json(const SensitivityFit& fit, const PhotonCount& photons,
                                 double v_sn, int n_nodes, Scheme kind) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["scheme"] = kind == Scheme::entangled ? "entangled" : "separable";
  doc["modes"] = n_nodes;
  doc["v_sn"] = v_sn;
  doc["sigma_min"] = fit.sigma_min;
  doc["sigma_min_err"] = fit.sigma_min_err;
  doc["k"] = fit.k;
  doc["k_err"] = fit.k_err;
  doc["theta1_deg"] = fit.theta1 * 180.0 / std::numbers::pi;
  doc["theta1_err_deg"] = fit.theta1_err * 180.0 / std::numbers::pi;
  doc["k_sq"] = fit.k_sq;
  doc["k_sq_err"] = fit.k_sq_err;
  doc["k_asq"] = fit.k_asq;
  doc["k_asq_err"] = fit.k_asq_err;
  doc["theta2_deg"] = fit.theta2 * 180.0 / std::numbers::pi;
  doc["theta2_err_deg"] = fit.theta2_err * 180.0 / std::numbers::pi;
  doc["N_coh"] = photons.N_coh;
  doc["N_sqz"] = photons.N_sqz;
  doc["negative_sqz_flag"] = photons.negative_sqz_flag;
  return doc.dump(2);
}

}  // namespace entsense
