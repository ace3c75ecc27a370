#include "entsense/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace entsense {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

std::vector<double> split_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

void write_covariance_csv(const std::string& path, const Eigen::MatrixXd& cov_half, int n_modes,
                          bool as_shot_noise_units) {
  auto out = open_out(path);
  out << "# n_modes=" << n_modes << " units=" << (as_shot_noise_units ? "snu" : "half") << "\n";
  const Eigen::MatrixXd m = as_shot_noise_units ? to_shot_noise_units(cov_half) : cov_half;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << "\n";
  }
}

CovarianceFile read_covariance_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# n_modes=", 0) != 0)
    throw std::runtime_error("covariance CSV: missing `# n_modes=` header: " + path);
  CovarianceFile out;
  std::stringstream hdr(line.substr(2));
  std::string tok;
  while (hdr >> tok) {
    if (tok.rfind("n_modes=", 0) == 0) out.n_modes = std::stoi(tok.substr(8));
    if (tok.rfind("units=", 0) == 0) out.shot_noise_units = tok.substr(6) == "snu";
  }
  if (out.n_modes < 1) throw std::runtime_error("covariance CSV: bad n_modes header");
  const int dim = 2 * out.n_modes;
  out.cov.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("covariance CSV: truncated file");
    const auto row = split_csv_row(line);
    if (int(row.size()) != dim) throw std::runtime_error("covariance CSV: bad row length");
    for (int j = 0; j < dim; ++j) out.cov(i, j) = row[j];
  }
  return out;
}

void write_mean_csv(const std::string& path, const Eigen::VectorXd& mean) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < mean.size(); ++i) out << (i ? "," : "") << mean(i);
  out << "\n";
}

Eigen::VectorXd read_mean_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("mean CSV: empty file");
  const auto row = split_csv_row(line);
  Eigen::VectorXd mean(row.size());
  for (size_t i = 0; i < row.size(); ++i) mean(i) = row[i];
  return mean;
}

void write_spectrum_csv(const std::string& path, const SpectrumTrace& trace) {
  auto out = open_out(path);
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# v_sn=" << trace.v_sn << "\n";
  out << "# phi_avg_rad=" << trace.phi_avg << "\n";
  out << "# n_averages=" << trace.n_averages << "\n";
  out << "# seed=" << trace.seed << "\n";
  out << "freq_hz,psd\n";
  for (size_t k = 0; k < trace.freqs_hz.size(); ++k)
    out << trace.freqs_hz[k] << "," << trace.psd[k] << "\n";
}

SpectrumTrace read_spectrum_csv(const std::string& path) {
  auto in = open_in(path);
  SpectrumTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "v_sn") trace.v_sn = std::stod(value);
      else if (key == "phi_avg_rad") trace.phi_avg = std::stod(value);
      else if (key == "n_averages") trace.n_averages = std::stoi(value);
      else if (key == "seed") trace.seed = std::stoull(value);
      continue;
    }
    if (line.rfind("freq_hz", 0) == 0) continue;
    const auto row = split_csv_row(line);
    if (row.size() != 2) throw std::runtime_error("spectrum CSV: bad row: " + line);
    trace.freqs_hz.push_back(row[0]);
    trace.psd.push_back(row[1]);
  }
  if (trace.freqs_hz.empty()) throw std::runtime_error("spectrum CSV: no data rows: " + path);
  return trace;
}

}  // namespace entsense
