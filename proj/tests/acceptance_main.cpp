// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. `--criterion n` restricts the run.
#include "entsense/analysis.hpp"
#include "entsense/fisher.hpp"
#include "entsense/sampling.hpp"
#include "entsense/sensitivity.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

using namespace entsense;

namespace {

const SchemeParams kHeadlineEnt{4, 2.48, 0.735, 0.30 / 2.48, Scheme::entangled};
const SchemeParams kHeadlineSep{1, 2.63, 0.735, 0.31 / 2.63, Scheme::separable};

struct Check {
  bool ok = true;
  std::ostringstream detail;
  template <class T>
  Check& operator<<(const T& v) {
    detail << v;
    return *this;
  }
  void expect(bool condition, const std::string& label) {
    if (!condition) {
      ok = false;
      detail << " [failed: " << label << "]";
    }
  }
};

// ---- 1: headline entangled sensitivity --------------------------------
Check criterion_1() {
  Check c;
  const SensitivityReport analytic = analytic_report(kHeadlineEnt);
  c << "analytic sigma_e=" << analytic.sigma;
  c.expect(analytic.sigma >= 0.096 && analytic.sigma <= 0.104, "sigma_e in [0.096, 0.104]");
  EmpiricalOptions opts;
  opts.d_phi = 0.01;
  opts.shots = 1000000;
  opts.seed = 20200811;
  const SensitivityReport mc = empirical_sensitivity(kHeadlineEnt, opts);
  c << ", monte-carlo " << mc.sigma << " +- " << mc.sigma_se;
  c.expect(std::abs(mc.sigma - analytic.sigma) <= 3.0 * mc.sigma_se,
           "monte-carlo within 3 standard errors");
  return c;
}

// ---- 2: standard quantum limit ----------------------------------------
Check criterion_2() {
  Check c;
  const double sql = standard_quantum_limit(4, 2.5);
  c << "SQL(4, 2.5)=" << sql << " rad = " << rad_to_deg(sql) << " deg";
  c.expect(std::abs(sql - 0.15811) < 5e-6, "0.15811 rad");
  c.expect(std::abs(rad_to_deg(sql) - 9.06) <= 0.01, "9.06 deg within 0.01");
  return c;
}

// ---- 3: separable comparison ------------------------------------------
Check criterion_3() {
  Check c;
  const double sigma_s = analytic_report(kHeadlineSep).sigma;
  const double sigma_e = analytic_report(kHeadlineEnt).sigma;
  c << "sigma_s=" << sigma_s << ", sigma_e=" << sigma_e;
  c.expect(sigma_s >= 0.110 && sigma_s <= 0.120, "sigma_s in [0.110, 0.120]");
  c.expect(sigma_s < 0.118 + 0.002, "below the measured upper value");
  c.expect(sigma_s > sigma_e, "entangled beats separable");
  return c;
}

// ---- 4: gain law at unit efficiency ------------------------------------
Check criterion_4() {
  Check c;
  const double n = 10.0;
  double worst = 0.0;
  for (int m = 1; m <= 10; ++m) {
    const double expected = std::sqrt((m * n + 1.0) / (n + 1.0));
    worst = std::max(worst, std::abs(gain(m, n, 1.0) - expected));
  }
  c << "max |gain - closed form| = " << worst;
  c.expect(worst < 1e-9, "exact closed form within 1e-9");
  const double tail = gain(4, 1e5, 1.0);
  c << ", gain(4, 1e5, 1)=" << tail;
  c.expect(std::abs(tail - 2.0) / 2.0 < 0.01, "G -> sqrt(M) within 1% at N=1e5");
  return c;
}

// ---- 5: vanishing-efficiency limit --------------------------------------
Check criterion_5() {
  Check c;
  const double limit = 1.0 / (2.0 * std::sqrt(40.0));
  const double ent = optimal_sigma(4, 10, 1e-4, Scheme::entangled);
  const double sep = optimal_sigma(4, 10, 1e-4, Scheme::separable);
  c << "sigma_e^opt=" << ent << ", sigma_s^opt=" << sep << ", limit=" << limit;
  c.expect(std::abs(ent - limit) / limit < 0.01, "entangled within 1%");
  c.expect(std::abs(sep - limit) / limit < 0.01, "separable within 1%");
  return c;
}

// ---- 6: Lagrangian optimality against a grid scan -----------------------
Check criterion_6() {
  Check c;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 1 + int(unif(rng) * 7);
    const double n = 0.2 + 20.0 * unif(rng);
    const double eta = 0.05 + 0.94 * unif(rng);
    for (Scheme kind : {Scheme::separable, Scheme::entangled}) {
      const double opt = optimal_sigma(m, n, eta, kind);
      double best = 1e300;
      for (int k = 1; k < 10000; ++k) {
        const AlphaR ar = derive_alpha_r({m, n, eta, k / 10000.0, kind});
        best = std::min(best, kind == Scheme::entangled
                                  ? sigma_entangled(ar.alpha, ar.r, eta)
                                  : sigma_separable(ar.alpha, ar.r, eta, m));
      }
      worst = std::max(worst, (opt - best) / opt);
    }
  }
  c << "max relative excess of closed form over grid minimum = " << worst;
  c.expect(worst < 1e-6, "grid never beats the optimum by more than 1e-6 relative");
  return c;
}

// ---- 7: Cramer-Rao bound suite ------------------------------------------
Check criterion_7() {
  Check c;
  // (a) numeric QFIM against the closed form on single-mode families
  double worst = 0.0;
  struct Fam {
    double mu, n, eta;
  };
  for (const Fam f : {Fam{0.0, 2.25, 1.0}, Fam{1.0, 2.5, 0.735}, Fam{0.4, 1.5, 0.9}}) {
    SchemeParams p{1, f.n, f.eta, f.mu, Scheme::separable};
    const AlphaR ar = derive_alpha_r(p);
    const double closed = qfi_single_mode(ar.alpha, ar.r, f.eta).F_sm;
    const double numeric = qfim_gaussian(p).F(0, 0);
    worst = std::max(worst, std::abs(numeric - closed) / closed);
  }
  c << "(a) max single-mode relative mismatch " << worst;
  c.expect(worst < 1e-4, "QFIM matches closed form within 1e-4");

  // (b) inequality chain at the experiment budget
  const QcrbOrdering rep = qcrb_ordering_report(2.5, 0.735, 4);
  c << "; (b) " << rep.sigma_cr_coh << " > " << rep.sigma_s_opt << " > " << rep.sigma_e_opt
    << " > " << rep.sigma_cr_sep << " > " << rep.sigma_cr_ent;
  c.expect(rep.all_hold(), "bound ordering chain");

  // (c) entangled bound overlaps the unsplit single-parameter bound
  const QfimResult fim = qfim_gaussian(kHeadlineEnt);
  const AlphaR ar = derive_alpha_r(kHeadlineEnt);
  const double single = 1.0 / qfi_single_mode(ar.alpha, ar.r, 0.735).F_sm;
  const double rel = std::abs(fim.qcrb_avg - single) / single;
  c << "; (c) qcrb_avg=" << fim.qcrb_avg << " vs single-parameter " << single << " (rel " << rel
    << ")";
  c.expect(rel < 1e-3, "overlap within 1e-3 relative");
  return c;
}

// ---- 8: entanglement certification ---------------------------------------
Check criterion_8() {
  Check c;
  // measured x-x and p-p covariance blocks of the four distributed probes
  // (shot-noise units); x-p cross blocks taken as zero
  Eigen::Matrix4d mx, mp;
  mx << 0.83, -0.18, -0.17, -0.19,
       -0.18, 0.84, -0.16, -0.18,
       -0.17, -0.16, 0.83, -0.18,
       -0.19, -0.18, -0.18, 0.82;
  mp << 3.0, 1.9, 1.9, 2.0,
        1.9, 2.8, 1.8, 1.9,
        1.9, 1.8, 2.8, 1.9,
        2.0, 1.9, 1.9, 3.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cov(2 * i, 2 * j) = mx(i, j) / 2.0;  // shot-noise units -> vacuum 1/2
      cov(2 * i + 1, 2 * j + 1) = mp(i, j) / 2.0;
    }
  const GaussianState state{4, Eigen::VectorXd::Zero(8), cov};

  auto class_mean = [&](int group_size, double& lo, double& hi) {
    double sum = 0.0;
    int count = 0;
    lo = 1e300;
    hi = -1e300;
    std::vector<int> members;
    std::function<void(int, int)> visit = [&](int next, int picked) {
      if (picked == group_size) {
        const GaussianState sub = group_size == 4 ? state : reduced(state, members);
        for (int t = 0; t < group_size; ++t) {
          const double value = logarithmic_negativity(sub, {t});
          sum += value;
          lo = std::min(lo, value);
          hi = std::max(hi, value);
          ++count;
        }
        return;
      }
      for (int m = next; m < 4; ++m) {
        members.push_back(m);
        visit(m + 1, picked + 1);
        members.pop_back();
      }
    };
    visit(0, 0);
    return sum / count;
  };

  const double targets[3] = {0.20, 0.33, 0.51};
  for (int g = 2; g <= 4; ++g) {
    double lo, hi;
    const double mean = class_mean(g, lo, hi);
    c << (g > 2 ? "; " : "") << g << "-mode groupings: mean " << std::setprecision(3) << mean
      << " (cuts " << lo << ".." << hi << ")";
    std::ostringstream label;
    label << g << "-mode negativity " << targets[g - 2] << " +- 0.02";
    c.expect(std::abs(mean - targets[g - 2]) <= 0.02, label.str());
  }
  return c;
}

// ---- 9: OPO squeezing spectrum -------------------------------------------
Check criterion_9() {
  Check c;
  OpoParams opo{8.0e6, 300e-3, 850e-3, 0.735};
  const double s_minus = opo_spectrum(opo, 3.0e6).s_minus;
  const double db = 10.0 * std::log10(s_minus);
  c << "S_minus=" << s_minus << " (" << db << " dB)";
  c.expect(std::abs(db - (-4.8)) <= 0.2, "within -4.8 +- 0.2 dB");
  return c;
}

// ---- 10: spectral pipeline round trip -------------------------------------
Check criterion_10() {
  Check c;
  const double phis_deg[12] = {0.3, 4.2, 8.2, 12.1, 16.1, 20.0, 75.0, 80.0, 84.0, 87.0, 89.0, 90.0};

  auto run_pipeline = [&](const SchemeParams& params, const SpectrumModel& model,
                          std::uint64_t seed) {
    std::vector<PhiPoint> pts;
    std::uint64_t stream = seed;
    for (double deg : phis_deg) {
      const SpectrumTrace trace =
          synthesize_spectrum(params, deg_to_rad(deg), 2000, splitmix64(stream), model);
      const PeakDecomposition peak = extract_peak(trace, model.f_peak_hz);
      pts.push_back({deg_to_rad(deg), peak.v_s, peak.v_n});
    }
    return fit_vs_vn(pts);
  };

  // clean headline run: recover sigma and the photon budget
  SpectrumModel clean;
  const SensitivityFit fit = run_pipeline(kHeadlineEnt, clean, 1010);
  const SensitivityReport truth = analytic_report(kHeadlineEnt);
  const PhotonCount count = count_photons(fit, clean.v_sn, 4, Scheme::entangled);
  c << "sigma_min=" << fit.sigma_min << "+-" << fit.sigma_min_err << " (true " << truth.sigma
    << "), N_coh=" << count.N_coh << ", N_sqz=" << count.N_sqz;
  c.expect(std::abs(fit.sigma_min - truth.sigma) <= 3.0 * fit.sigma_min_err,
           "sigma_min within 3 sigma");
  c.expect(std::abs(count.N_coh - truth.N_coh) <= 0.15, "N_coh within 3 sigma");
  c.expect(std::abs(count.N_sqz - truth.N_sqz) <= 0.05, "N_sqz within 3 sigma");

  // offset injection at the strongest-squeezing operating point
  SchemeParams strong{4, 3.0, 0.735, 0.735 * 2.1825 / 12.0, Scheme::entangled};
  SpectrumModel offset;
  offset.theta1 = deg_to_rad(3.4);
  offset.theta2 = deg_to_rad(1.6);
  const SensitivityFit skew = run_pipeline(strong, offset, 2020);
  c << "; theta1=" << rad_to_deg(skew.theta1) << "+-" << rad_to_deg(skew.theta1_err)
    << " deg, theta2=" << rad_to_deg(skew.theta2) << "+-" << rad_to_deg(skew.theta2_err) << " deg";
  c.expect(std::abs(skew.theta1 - offset.theta1) <= 3.0 * skew.theta1_err,
           "theta1 recovered within fit error");
  c.expect(std::abs(skew.theta2 - offset.theta2) <= 3.0 * skew.theta2_err,
           "theta2 recovered within fit error");
  const double penalty1 = 1.0 / std::cos(skew.theta1) - 1.0;
  const double ratio2 = skew.k_asq * skew.k_asq / (skew.k_sq * skew.k_sq);
  const double penalty2 =
      std::sqrt(1.0 + (ratio2 - 1.0) * std::sin(skew.theta2) * std::sin(skew.theta2)) - 1.0;
  c << ", penalties " << 100.0 * penalty1 << "% / " << 100.0 * penalty2 << "%";
  c.expect(std::abs(penalty1 - 0.002) <= 5e-4, "theta1 penalty near 0.2%");
  c.expect(std::abs(penalty2 - 0.009) <= 2e-3, "theta2 penalty near 0.9%");
  return c;
}

// ---- 11: calibration model -------------------------------------------------
Check criterion_11() {
  Check c;
  // ideal Jones components: exactly 4 degrees of phase per degree of plate
  ChannelSweep ideal;
  for (int t = 0; t <= 8; ++t) {
    ideal.theta_v_deg.push_back(double(t));
    std::vector<std::pair<double, double>> fringe;
    for (int s = 0; s < 24; ++s)
      fringe.push_back({15.0 * s, waveplate_phase(double(t), 15.0 * s).i_hd});
    ideal.fringes.push_back(fringe);
  }
  const CalibrationFit jones = calibrate_channels({ideal});
  c << "ideal slope=" << std::setprecision(10) << jones.k[0];
  c.expect(std::abs(std::abs(jones.k[0]) - 4.0) < 1e-9, "ideal slope exactly 4");

  // synthetic sweeps from the measured calibration table
  const double slopes[4] = {-3.96, -3.97, -3.95, -3.96};
  const double offsets[4] = {-0.13, -0.59, -0.64, 0.37};
  std::vector<ChannelSweep> sweeps;
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> gauss(0.0, 0.004);
  for (int j = 0; j < 4; ++j) {
    ChannelSweep sweep;
    for (int t = 0; t <= 8; ++t) {
      sweep.theta_v_deg.push_back(double(t));
      std::vector<std::pair<double, double>> fringe;
      for (int s = 0; s < 24; ++s) {
        const double scan = 15.0 * s;
        fringe.push_back(
            {scan, std::sin(deg_to_rad(slopes[j] * t + offsets[j] + scan)) + gauss(rng)});
      }
      sweep.fringes.push_back(fringe);
    }
    sweeps.push_back(sweep);
  }
  const CalibrationFit table = calibrate_channels(sweeps);
  double worst = 0.0;
  for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(table.k[j] - slopes[j]));
  c << ", table slopes recovered within " << worst << " (avg " << table.slope_avg << ")";
  c.expect(worst <= 0.02, "slopes within 0.02");
  c.expect(std::abs(table.slope_avg + 3.96) <= 0.02, "average slope 3.96 within 0.02");
  return c;
}

// ---- 12: property suites -----------------------------------------------------
Check criterion_12() {
  Check c;
  std::mt19937_64 rng(1212);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // symplectic-form preservation of the passive maps
  double worst_symp = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + int(unif(rng) * 3);
    const auto u = bsn_unitary(n);
    const Eigen::MatrixXd s = symplectic_from_unitary<double>(u);
    const Eigen::MatrixXd omega = symplectic_form(n);
    worst_symp = std::max(worst_symp,
                          (s * omega * s.transpose() - omega).lpNorm<Eigen::Infinity>());
  }
  c.expect(worst_symp < 1e-10, "symplectic form preserved");

  // uncertainty relation and photon conservation under passive optics
  for (int trial = 0; trial < 20; ++trial) {
    GaussianState st = squeeze_displace(2.0 * unif(rng) - 1.0, 1.2 * unif(rng));
    for (int m = 1; m < 4; ++m)
      st = tensor(st, squeeze_displace(2.0 * unif(rng) - 1.0, 1.2 * unif(rng)));
    const double photons_before = photon_number(st);
    for (int step = 0; step < 4; ++step) {
      st = beamsplitter(st, step % 4, (step + 1) % 4, unif(rng));
      st = phase_shift(st, 6.28 * unif(rng), step % 4);
    }
    c.expect(std::abs(photon_number(st) - photons_before) < 1e-10 * (1.0 + photons_before),
             "photon conservation");
    c.expect(symplectic_eigenvalues<double>(st.cov).minCoeff() > 0.5 - 1e-9,
             "uncertainty relation");
    if (!c.ok) break;
  }

  // Monte Carlo against the closed form, 50 random draws
  int misses = 0;
  double worst_pull = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    SchemeParams p;
    p.M = 1 + int(unif(rng) * 4);
    p.N = 0.4 + 5.0 * unif(rng);
    p.eta = 0.35 + 0.65 * unif(rng);
    if (p.eta > 1.0) p.eta = 1.0;
    p.mu = 0.85 * unif(rng);
    p.kind = trial % 2 ? Scheme::entangled : Scheme::separable;
    EmpiricalOptions opts;
    opts.d_phi = 0.9 * small_angle_bound(derive_alpha_r(p).r) / 10.0;
    opts.shots = 40000;
    opts.seed = 5000 + trial;
    const SensitivityReport mc = empirical_sensitivity(p, opts);
    const double pull = std::abs(mc.sigma - analytic_report(p).sigma) / mc.sigma_se;
    worst_pull = std::max(worst_pull, pull);
    if (pull > 3.0) ++misses;
  }
  c << "worst symplectic defect " << worst_symp << ", worst monte-carlo pull " << worst_pull
    << " sigma";
  c.expect(misses == 0, "all 50 draws within 3 standard errors");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) selected.push_back(std::atoi(argv[++i]));
  }
  using Runner = std::function<Check()>;
  const std::pair<const char*, Runner> criteria[] = {
      {"headline entangled sensitivity", criterion_1},
      {"standard quantum limit", criterion_2},
      {"separable comparison", criterion_3},
      {"gain law", criterion_4},
      {"vanishing-efficiency limit", criterion_5},
      {"split-ratio optimality", criterion_6},
      {"Cramer-Rao bound suite", criterion_7},
      {"entanglement certification", criterion_8},
      {"OPO squeezing spectrum", criterion_9},
      {"pipeline round trip", criterion_10},
      {"calibration model", criterion_11},
      {"property suites", criterion_12},
  };

  int failures = 0;
  for (int k = 0; k < 12; ++k) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), k + 1) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criteria[k].second();
    } catch (const std::exception& err) {
      result.ok = false;
      result.detail << " [exception: " << err.what() << "]";
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    std::cout << (result.ok ? "[PASS]" : "[FAIL]") << " criterion " << std::setw(2) << k + 1
              << " (" << criteria[k].first << "): " << result.detail.str() << "  ["
              << std::fixed << std::setprecision(0) << ms << " ms]" << std::defaultfloat
              << std::endl;
    if (!result.ok) ++failures;
  }
  return failures;
}
