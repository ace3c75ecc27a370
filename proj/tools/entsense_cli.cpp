// Command-line front end: every computation in the library is exposed as a
// subcommand writing CSV or JSON, suitable for scripted figure reproduction.
#include "CLI11.hpp"

#include "entsense/analysis.hpp"
#include "entsense/fisher.hpp"
#include "entsense/io.hpp"
#include "entsense/sampling.hpp"
#include "entsense/sensitivity.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace entsense;
using nlohmann::json;

struct GridSpec {
  std::string variable;  // "M" or "N"
  double start = 1.0, stop = 1.0;
  int count = 1;
  bool log = false;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("--grid expects var=start:stop[:count[:log]]");
  g.variable = text.substr(0, eq);
  if (g.variable != "M" && g.variable != "N")
    throw std::invalid_argument("--grid variable must be M or N");
  std::stringstream ss(text.substr(eq + 1));
  std::string tok;
  std::vector<std::string> parts;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() < 2) throw std::invalid_argument("--grid expects start:stop");
  g.start = std::stod(parts[0]);
  g.stop = std::stod(parts[1]);
  g.count = parts.size() > 2 ? std::stoi(parts[2]) : int(g.stop - g.start) + 1;
  g.log = parts.size() > 3 && parts[3] == "log";
  if (g.count < 1 || g.stop < g.start) throw std::invalid_argument("--grid range is empty");
  return g;
}

std::vector<double> grid_values(const GridSpec& g) {
  std::vector<double> out;
  if (g.count == 1) return {g.start};
  for (int k = 0; k < g.count; ++k) {
    const double t = double(k) / double(g.count - 1);
    out.push_back(g.log ? g.start * std::pow(g.stop / g.start, t)
                        : g.start + t * (g.stop - g.start));
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

struct CommonOpts {
  std::string scheme = "entangled";
  int modes = 4;
  double photons = 2.48;
  double eta = 0.735;
  double mu = 0.30 / 2.48;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 1;

  SchemeParams params() const {
    if (scheme != "separable" && scheme != "entangled")
      throw std::invalid_argument("scheme must be `separable` or `entangled`");
    SchemeParams p;
    p.kind = scheme == "separable" ? Scheme::separable : Scheme::entangled;
    p.M = modes;
    p.N = photons;
    p.eta = eta;
    p.mu = mu;
    return p;
  }

  json config_json(const std::string& command) const {
    json c;
    c["command"] = command;
    c["scheme"] = scheme;
    c["modes"] = modes;
    c["photons"] = photons;
    c["eta"] = eta;
    c["mu"] = mu;
    c["seed"] = seed;
    return c;
  }

  std::string config_comment(const std::string& command) const {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion << "\n";
    os << "# config: command=" << command << " scheme=" << scheme << " modes=" << modes
       << " photons=" << photons << " eta=" << eta << " mu=" << mu << " seed=" << seed << "\n";
    return os.str();
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->set_config("--config", "", "flat key=value config file; command-line flags win");
  cmd->add_option("--scheme", opts.scheme, "separable or entangled");
  cmd->add_option("--modes", opts.modes, "node count M");
  cmd->add_option("--photons", opts.photons, "mean photons per sample N");
  cmd->add_option("--eta", opts.eta, "channel efficiency in (0,1]");
  cmd->add_option("--mu", opts.mu, "squeezed-photon fraction in [0,1]");
  cmd->add_option("--out", opts.out_path, "output file (stdout if omitted)");
  cmd->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", opts.seed, "random seed for stochastic commands");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open output file: " + path);
  file << text;
}

int run(CLI::App& app, int argc, char** argv) {
  app.require_subcommand(1);

  // ---- gain-curve ----------------------------------------------------
  auto* gain_cmd = app.add_subcommand("gain-curve", "entangled-versus-separable gain over a grid");
  CommonOpts gain_opts;
  auto gain_grid = std::make_shared<std::string>("M=1:10");
  auto gain_etas = std::make_shared<std::string>("1.0");
  add_common(gain_cmd, gain_opts);
  gain_cmd->add_option("--grid", *gain_grid, "M=a:b[:n] or N=a:b:n[:log]");
  gain_cmd->add_option("--eta-list", *gain_etas, "comma-separated efficiencies");
  gain_cmd->callback([&gain_opts, gain_grid, gain_etas] {
    const GridSpec grid = parse_grid(*gain_grid);
    std::ostringstream os;
    os << gain_opts.config_comment("gain-curve");
    os << "# grid=" << *gain_grid << " eta_list=" << *gain_etas << "\n";
    os << "M,N,eta,gain\n";
    os << std::setprecision(12);
    for (double eta : parse_list(*gain_etas))
      for (double v : grid_values(grid)) {
        const int m = grid.variable == "M" ? int(std::lround(v)) : gain_opts.modes;
        const double n = grid.variable == "N" ? v : gain_opts.photons;
        os << m << "," << n << "," << eta << "," << gain(m, n, eta) << "\n";
      }
    emit(gain_opts.out_path, os.str());
  });

  // ---- sensitivity ---------------------------------------------------
  auto* sens_cmd = app.add_subcommand("sensitivity", "closed-form sensitivity report");
  CommonOpts sens_opts;
  auto eta_band = std::make_shared<std::string>();
  add_common(sens_cmd, sens_opts);
  sens_cmd->add_option("--eta-band", *eta_band, "lo,hi efficiency band for the sigma envelope");
  sens_cmd->callback([&sens_opts, eta_band] {
    const SchemeParams p = sens_opts.params();
    const SensitivityReport rep = analytic_report(p);
    const OptimalPoint opt = optimal_point(p.M, p.N, p.eta, p.kind);
    const AlphaR ar = derive_alpha_r(p);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = sens_opts.config_json("sensitivity");
    doc["alpha"] = ar.alpha;
    doc["r"] = ar.r;
    doc["sigma"] = rep.sigma;
    doc["resolvable_deg"] = rep.resolvable_deg;
    doc["slope"] = rep.slope;
    doc["noise_var"] = rep.noise_var;
    doc["N_coh"] = rep.N_coh;
    doc["N_sqz"] = rep.N_sqz;
    doc["sigma_opt"] = opt.sigma_opt;
    doc["mu_opt"] = opt.mu_opt;
    doc["sql"] = standard_quantum_limit(p.M, p.N);
    doc["small_angle_bound_rad"] = small_angle_bound(ar.r);
    if (!eta_band->empty()) {
      const auto band = parse_list(*eta_band);
      if (band.size() != 2) throw std::invalid_argument("--eta-band expects lo,hi");
      SchemeParams lo = p, hi = p;
      lo.eta = band[0];
      hi.eta = band[1];
      doc["sigma_eta_band"] = {analytic_report(lo).sigma, analytic_report(hi).sigma};
    }
    emit(sens_opts.out_path, doc.dump(2) + "\n");
  });

  // ---- qcrb ----------------------------------------------------------
  auto* qcrb_cmd = app.add_subcommand("qcrb", "Cramer-Rao bound comparison over a photon grid");
  CommonOpts qcrb_opts;
  auto qcrb_grid = std::make_shared<std::string>("N=2.5:2.5:1");
  auto qcrb_fd = std::make_shared<QfimOptions>();
  add_common(qcrb_cmd, qcrb_opts);
  qcrb_cmd->add_option("--grid", *qcrb_grid, "N=a:b:n[:log]");
  qcrb_cmd->add_option("--dphi", qcrb_fd->d_phi, "finite-difference step, radians");
  qcrb_cmd->add_option("--epsilon", qcrb_fd->epsilon, "thermal regularization photons");
  qcrb_cmd->callback([&qcrb_opts, qcrb_grid, qcrb_fd] {
    const GridSpec grid = parse_grid(*qcrb_grid);
    if (grid.variable != "N") throw std::invalid_argument("qcrb grid must run over N");
    std::ostringstream os;
    os << qcrb_opts.config_comment("qcrb");
    os << "N,sigma_coh_cr,sigma_s_opt,sigma_e_opt,sigma_sep_cr,sigma_ent_cr,ordering_ok\n";
    os << std::setprecision(10);
    for (double n : grid_values(grid)) {
      const QcrbOrdering rep = qcrb_ordering_report(n, qcrb_opts.eta, qcrb_opts.modes, *qcrb_fd);
      os << n << "," << rep.sigma_cr_coh << "," << rep.sigma_s_opt << "," << rep.sigma_e_opt
         << "," << rep.sigma_cr_sep << "," << rep.sigma_cr_ent << "," << (rep.all_hold() ? 1 : 0)
         << "\n";
    }
    emit(qcrb_opts.out_path, os.str());
  });

  // ---- montecarlo ----------------------------------------------------
  auto* mc_cmd = app.add_subcommand("montecarlo", "homodyne Monte-Carlo sensitivity estimate");
  CommonOpts mc_opts;
  auto mc_phi0_deg = std::make_shared<double>(0.0);
  auto mc_dphi_deg = std::make_shared<double>(0.5);
  auto mc_shots = std::make_shared<int>(1000000);
  add_common(mc_cmd, mc_opts);
  mc_cmd->add_option("--phi-deg", *mc_phi0_deg, "working point, degrees");
  mc_cmd->add_option("--dphi-deg", *mc_dphi_deg, "finite-difference step, degrees");
  mc_cmd->add_option("--shots", *mc_shots, "samples per phase setting");
  mc_cmd->callback([&mc_opts, mc_phi0_deg, mc_dphi_deg, mc_shots] {
    EmpiricalOptions opts;
    opts.phi0 = deg_to_rad(*mc_phi0_deg);
    opts.d_phi = deg_to_rad(*mc_dphi_deg);
    opts.shots = *mc_shots;
    opts.seed = mc_opts.seed;
    const SchemeParams p = mc_opts.params();
    const SensitivityReport mc = empirical_sensitivity(p, opts);
    const SensitivityReport analytic = analytic_report(p);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = mc_opts.config_json("montecarlo");
    doc["config"]["phi_deg"] = *mc_phi0_deg;
    doc["config"]["dphi_deg"] = *mc_dphi_deg;
    doc["config"]["shots"] = *mc_shots;
    doc["sigma_mc"] = mc.sigma;
    doc["sigma_mc_se"] = mc.sigma_se;
    doc["slope_mc"] = mc.slope;
    doc["slope_se"] = mc.slope_se;
    doc["noise_var_mc"] = mc.noise_var;
    doc["slope_unstable"] = mc.slope_unstable;
    doc["sigma_analytic"] = analytic.sigma;
    doc["agrees_within_3se"] = std::abs(mc.sigma - analytic.sigma) <= 3.0 * mc.sigma_se;
    emit(mc_opts.out_path, doc.dump(2) + "\n");
  });

  // ---- synthesize ----------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synthesize", "synthetic sideband spectra");
  CommonOpts synth_opts;
  auto synth_phis = std::make_shared<std::string>("12.0");
  auto synth_averages = std::make_shared<int>(2000);
  auto synth_theta1 = std::make_shared<double>(0.0);
  auto synth_theta2 = std::make_shared<double>(0.0);
  auto synth_vsn = std::make_shared<double>(1.0);
  add_common(synth_cmd, synth_opts);
  synth_cmd->add_option("--phi-deg", *synth_phis, "comma-separated phi_avg values, degrees");
  synth_cmd->add_option("--averages", *synth_averages, "number of averaged periodograms");
  synth_cmd->add_option("--theta1-deg", *synth_theta1, "signal phase offset");
  synth_cmd->add_option("--theta2-deg", *synth_theta2, "noise-quadrature phase offset");
  synth_cmd->add_option("--v-sn", *synth_vsn, "shot-noise reference voltage");
  synth_cmd->callback([&synth_opts, synth_phis, synth_averages, synth_theta1, synth_theta2,
                       synth_vsn] {
    const auto phis = parse_list(*synth_phis);
    SpectrumModel model;
    model.theta1 = deg_to_rad(*synth_theta1);
    model.theta2 = deg_to_rad(*synth_theta2);
    model.v_sn = *synth_vsn;
    const SchemeParams p = synth_opts.params();
    std::uint64_t stream = synth_opts.seed;
    for (size_t k = 0; k < phis.size(); ++k) {
      const SpectrumTrace trace = synthesize_spectrum(p, deg_to_rad(phis[k]), *synth_averages,
                                                      splitmix64(stream), model);
      std::string path = synth_opts.out_path;
      if (phis.size() > 1) {
        if (path.empty()) throw std::invalid_argument("multiple phases need --out");
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_%03zu", k);
        const auto dot = path.rfind('.');
        path = dot == std::string::npos ? path + suffix
                                        : path.substr(0, dot) + suffix + path.substr(dot);
      }
      write_spectrum_csv(path.empty() ? "/dev/stdout" : path, trace);
    }
  });

  // ---- analyze -------------------------------------------------------
  auto* analyze_cmd = app.add_subcommand("analyze", "spectral peak decomposition and model fits");
  CommonOpts analyze_opts;
  auto analyze_inputs = std::make_shared<std::vector<std::string>>();
  auto analyze_peak_hz = std::make_shared<double>(3.0e6);
  add_common(analyze_cmd, analyze_opts);
  analyze_cmd->add_option("--in", *analyze_inputs, "spectrum CSV files, one per phase setting")
      ->required();
  analyze_cmd->add_option("--peak-hz", *analyze_peak_hz, "carrier bin frequency");
  analyze_cmd->callback([&analyze_opts, analyze_inputs, analyze_peak_hz] {
    std::vector<PhiPoint> points;
    double v_sn = 1.0;
    for (const auto& path : *analyze_inputs) {
      const SpectrumTrace trace = read_spectrum_csv(path);
      const PeakDecomposition peak = extract_peak(trace, *analyze_peak_hz);
      points.push_back({trace.phi_avg, peak.v_s, peak.v_n});
      v_sn = trace.v_sn;
    }
    const SchemeParams p = analyze_opts.params();
    const SensitivityFit fit = fit_vs_vn(points);
    const PhotonCount photons = count_photons(fit, v_sn, p.M, p.kind);
    json doc = json::parse(analysis_report_json(fit, photons, v_sn, p.M, p.kind));
    doc["config"] = analyze_opts.config_json("analyze");
    if (p.kind == Scheme::separable)
      doc["sigma_min_rescaled"] = fit.sigma_min / std::sqrt(double(p.M));
    emit(analyze_opts.out_path, doc.dump(2) + "\n");
  });

  // ---- calibrate -----------------------------------------------------
  auto* cal_cmd =
      app.add_subcommand("calibrate", "wave-plate phase calibration on synthetic sweeps");
  CommonOpts cal_opts;
  auto cal_slopes = std::make_shared<std::string>();
  auto cal_offsets = std::make_shared<std::string>();
  auto cal_ret_half = std::make_shared<double>(1.0);
  auto cal_ret_quarter = std::make_shared<double>(1.0);
  auto cal_phi_d = std::make_shared<double>(0.0);
  auto cal_noise = std::make_shared<double>(0.0);
  auto cal_positions = std::make_shared<int>(9);
  add_common(cal_cmd, cal_opts);
  cal_cmd->add_option("--slopes", *cal_slopes, "true slopes per channel (sine-model sweeps)");
  cal_cmd->add_option("--offsets", *cal_offsets, "true offsets per channel, degrees");
  cal_cmd->add_option("--ret-half", *cal_ret_half, "half-wave retardance in units of pi");
  cal_cmd->add_option("--ret-quarter", *cal_ret_quarter, "quarter-wave retardance in units of pi/2");
  cal_cmd->add_option("--phi-deg", *cal_phi_d, "initial probe/local-oscillator phase, degrees");
  cal_cmd->add_option("--positions", *cal_positions, "plate positions over the 8-degree range");
  cal_cmd->add_option("--noise", *cal_noise, "fringe sample noise, absolute");
  cal_cmd->callback([&cal_opts, cal_slopes, cal_offsets, cal_ret_half, cal_ret_quarter, cal_phi_d,
                     cal_noise, cal_positions] {
    std::mt19937_64 rng(cal_opts.seed);
    std::normal_distribution<double> gauss(0.0, *cal_noise);
    std::vector<double> slopes, offsets;
    if (!cal_slopes->empty()) {
      slopes = parse_list(*cal_slopes);
      offsets = cal_offsets->empty() ? std::vector<double>(slopes.size(), 0.0)
                                     : parse_list(*cal_offsets);
      if (offsets.size() != slopes.size())
        throw std::invalid_argument("--offsets must match --slopes");
    }
    const int channels = slopes.empty() ? 4 : int(slopes.size());
    std::vector<ChannelSweep> sweeps;
    for (int j = 0; j < channels; ++j) {
      ChannelSweep sweep;
      for (int t = 0; t < *cal_positions; ++t) {
        const double theta = 8.0 * t / std::max(*cal_positions - 1, 1);
        sweep.theta_v_deg.push_back(theta);
        std::vector<std::pair<double, double>> fringe;
        for (int s = 0; s < 24; ++s) {
          const double scan = 15.0 * s;
          double value;
          if (!slopes.empty()) {
            value = std::sin(deg_to_rad(slopes[j] * theta + offsets[j] + scan));
          } else {
            value = waveplate_phase(theta, *cal_phi_d + scan, std::numbers::pi * *cal_ret_half,
                                    std::numbers::pi / 2.0 * *cal_ret_quarter)
                        .i_hd;
          }
          if (*cal_noise > 0.0) value += gauss(rng);
          fringe.push_back({scan, value});
        }
        sweep.fringes.push_back(fringe);
      }
      sweeps.push_back(sweep);
    }
    const CalibrationFit fit = calibrate_channels(sweeps);
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = cal_opts.config_json("calibrate");
    doc["k"] = fit.k;
    doc["b"] = fit.b;
    doc["residual_rms_deg"] = fit.residual_rms_deg;
    doc["slope_avg"] = fit.slope_avg;
    doc["slope_avg_sd"] = fit.slope_avg_sd;
    emit(cal_opts.out_path, doc.dump(2) + "\n");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed phase sensing over an entangled optical network: "
               "sensitivities, Fisher-information bounds, Monte-Carlo homodyne "
               "simulation and the spectral analysis pipeline"};
  try {
    return run(app, argc, argv);
  } catch (const std::invalid_argument& err) {
    std::cerr << nlohmann::json{{"error", err.what()}, {"type", "validation"}}.dump() << std::endl;
    return 2;
  } catch (const std::exception& err) {
    std::cerr << nlohmann::json{{"error", err.what()}, {"type", "numerical"}}.dump() << std::endl;
    return 3;
  }
}
