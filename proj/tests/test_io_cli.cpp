#include "entsense/io.hpp"

#include "entsense/sensitivity.hpp"

#include "doctest.h"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace entsense;
using nlohmann::json;

namespace {

std::string tmp_path(const std::string& name) { return "entsense_test_" + name; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ENTSENSE_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("covariance and mean CSV round trip") {
  const GaussianState st = sense({4, 2.48, 0.735, 0.30 / 2.48, Scheme::entangled},
                                 Eigen::VectorXd::Constant(4, 0.05));
  for (bool snu : {false, true}) {
    const std::string path = tmp_path(snu ? "cov_snu.csv" : "cov_half.csv");
    write_covariance_csv(path, st.cov, st.n_modes, snu);
    const CovarianceFile file = read_covariance_csv(path);
    CHECK(file.n_modes == 4);
    CHECK(file.shot_noise_units == snu);
    const Eigen::MatrixXd back = snu ? from_shot_noise_units(file.cov) : file.cov;
    CHECK((back - st.cov).lpNorm<Eigen::Infinity>() < 1e-12);
    std::remove(path.c_str());
  }
  const std::string mean_path = tmp_path("mean.csv");
  write_mean_csv(mean_path, st.mean);
  CHECK((read_mean_csv(mean_path) - st.mean).lpNorm<Eigen::Infinity>() < 1e-12);
  std::remove(mean_path.c_str());
}

TEST_CASE("spectrum CSV round trip keeps the header metadata") {
  const SpectrumTrace trace =
      synthesize_spectrum({4, 2.48, 0.735, 0.3 / 2.48, Scheme::entangled}, 0.21, 2000, 77);
  const std::string path = tmp_path("trace.csv");
  write_spectrum_csv(path, trace);
  const SpectrumTrace back = read_spectrum_csv(path);
  CHECK(back.v_sn == doctest::Approx(trace.v_sn));
  CHECK(back.phi_avg == doctest::Approx(0.21));
  CHECK(back.n_averages == 2000);
  CHECK(back.seed == 77);
  REQUIRE(back.psd.size() == trace.psd.size());
  for (size_t k = 0; k < trace.psd.size(); ++k)
    CHECK(back.psd[k] == doctest::Approx(trace.psd[k]).epsilon(1e-12));
  std::remove(path.c_str());
}

TEST_CASE("scheme config file") {
  const std::string path = tmp_path("scheme.cfg");
  {
    std::ofstream out(path);
    out << "# probe configuration\n";
    out << "scheme = entangled\n";
    out << "M = 4\n";
    out << "N = 2.48\n";
    out << "eta = 0.735\n";
    out << "mu = 0.12\n";
    out << "phis = 0.01, 0.02, 0.03, 0.04\n";
  }
  const SchemeConfig cfg = parse_scheme_config(path);
  CHECK(cfg.params.kind == Scheme::entangled);
  CHECK(cfg.params.M == 4);
  CHECK(cfg.params.N == doctest::Approx(2.48));
  CHECK(cfg.params.eta == doctest::Approx(0.735));
  CHECK(cfg.params.mu == doctest::Approx(0.12));
  CHECK(cfg.phis(2) == doctest::Approx(0.03));
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "scheme entangled\n";
  }
  CHECK_THROWS_AS(parse_scheme_config(path), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("cli: deterministic montecarlo output") {
  const std::string a = tmp_path("mc_a.json"), b = tmp_path("mc_b.json");
  REQUIRE(run_cli("montecarlo --shots 20000 --seed 99 --out " + a) == 0);
  REQUIRE(run_cli("montecarlo --shots 20000 --seed 99 --out " + b) == 0);
  CHECK(slurp(a) == slurp(b));
  const json doc = json::parse(slurp(a));
  CHECK(doc["schema_version"] == kSchemaVersion);
  CHECK(doc["config"]["seed"] == 99);
  CHECK(doc["agrees_within_3se"].get<bool>());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("cli: synthesize then analyze round trip") {
  const std::string prefix = tmp_path("round.csv");
  REQUIRE(run_cli("synthesize --phi-deg 0.3,4.2,8.2,12.1,16.1,20.0,75,80,84,87,89,90 "
                  "--averages 2000 --seed 5 --out " + prefix) == 0);
  std::string in_args;
  for (int k = 0; k < 12; ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "entsense_test_round_%03d.csv", k);
    in_args += std::string(" --in ") + name;
  }
  const std::string report = tmp_path("report.json");
  REQUIRE(run_cli("analyze" + in_args + " --out " + report) == 0);
  const json doc = json::parse(slurp(report));
  const SensitivityReport analytic =
      analytic_report({4, 2.48, 0.735, 0.30 / 2.48, Scheme::entangled});
  CHECK(doc["sigma_min"].get<double>() ==
        doctest::Approx(analytic.sigma).epsilon(0.03));
  CHECK(doc["N_coh"].get<double>() == doctest::Approx(analytic.N_coh).epsilon(0.06));
  CHECK(doc["N_sqz"].get<double>() == doctest::Approx(analytic.N_sqz).epsilon(0.15));
  for (int k = 0; k < 12; ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "entsense_test_round_%03d.csv", k);
    std::remove(name);
  }
  std::remove(report.c_str());
}

TEST_CASE("cli: gain curve schema") {
  const std::string path = tmp_path("gain.csv");
  REQUIRE(run_cli("gain-curve --grid M=1:10 --eta-list 1.0 --photons 10 --out " + path) == 0);
  const std::string text = slurp(path);
  CHECK(text.find("# schema_version=") != std::string::npos);
  CHECK(text.find("M,N,eta,gain") != std::string::npos);
  // first row is M=1 with unit gain, column order (M, N, eta, G)
  std::stringstream ss(text);
  std::string line;
  double first_gain = -1.0;
  int rows = 0;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'M') continue;
    ++rows;
    if (first_gain < 0) {
      std::stringstream row(line);
      std::string cell;
      std::getline(row, cell, ',');
      CHECK(cell == "1");
      std::getline(row, cell, ',');
      std::getline(row, cell, ',');
      std::getline(row, cell, ',');
      first_gain = std::stod(cell);
    }
  }
  CHECK(rows == 10);
  CHECK(first_gain == doctest::Approx(1.0));
  std::remove(path.c_str());
}

TEST_CASE("cli: calibrate reproduces the table parameters") {
  const std::string path = tmp_path("cal.json");
  REQUIRE(run_cli("calibrate --slopes -3.96,-3.97,-3.95,-3.96 "
                  "--offsets -0.13,-0.59,-0.64,0.37 --noise 0.003 --seed 4 --out " + path) == 0);
  const json doc = json::parse(slurp(path));
  CHECK(doc["slope_avg"].get<double>() == doctest::Approx(-3.96).epsilon(0.005));
  CHECK(std::abs(doc["k"][0].get<double>() + 3.96) < 0.02);
  std::remove(path.c_str());
}

TEST_CASE("cli: exit codes") {
  CHECK(run_cli("sensitivity --eta 1.7 --out /dev/null 2>/dev/null") == 2);
  CHECK(run_cli("definitely-not-a-command 2>/dev/null") == 2);
  CHECK(run_cli("sensitivity --mu 1.0 --photons 0.0 --out /dev/null 2>/dev/null") == 2);
}

TEST_CASE("cli: config file with flag precedence") {
  const std::string cfg = tmp_path("cli.cfg");
  {
    std::ofstream out(cfg);
    out << "photons=5.0\neta=0.9\n";
  }
  const std::string out_a = tmp_path("cfg_a.json");
  REQUIRE(run_cli("sensitivity --config " + cfg + " --mu 0.1 --out " + out_a) == 0);
  json doc = json::parse(slurp(out_a));
  CHECK(doc["config"]["photons"].get<double>() == doctest::Approx(5.0));
  CHECK(doc["config"]["eta"].get<double>() == doctest::Approx(0.9));

  // flags win over the config file
  const std::string out_b = tmp_path("cfg_b.json");
  REQUIRE(run_cli("sensitivity --config " + cfg + " --photons 2.0 --mu 0.1 --out " + out_b) == 0);
  doc = json::parse(slurp(out_b));
  CHECK(doc["config"]["photons"].get<double>() == doctest::Approx(2.0));
  std::remove(cfg.c_str());
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}
