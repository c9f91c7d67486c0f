#pragma once

#include <string>
#include <vector>

#include "hbf/design.hpp"
#include "hbf/quantization.hpp"
#include "hbf/scenario.hpp"
#include "hbf/vm_constellation.hpp"

namespace hbf {

// Per-component power draws in mW plus the fraction of active VMs.
struct PowerProfile {
  double p_lna = 20.0;
  double p_vm = 10.0;
  double p_mix = 15.0;
  double p_bb = 5.0;
  double p_adc = 0.5;
  double sparsity_coeff = 1.0;

  void validate() const;
};

double power_fully_digital(int n_antennas, const PowerProfile& profile);
double power_hybrid(int n_antennas, int n_chains, const PowerProfile& profile);

// Empirical recovery MSE of s_hat = B * Q(A x) over dithered quantization
// trials. Chunked with per-chunk derived seeds, so the result is identical
// for a given seed regardless of thread count.
double monte_carlo_mse(const CMatrix& combiner, const CMatrix& filter,
                       const Scenario& scenario, const AdcModel& adc, long n_trials,
                       uint64_t seed, int threads = 1);

// Complex gain of one combiner output toward incidence angle psi.
Complex array_factor(const CMatrix& combiner, int chain, double angle,
                     double spacing_ratio);

struct AfTable {
  std::vector<double> angles;  // radians
  CMatrix gains;               // P x |angles|
};

AfTable af_sweep(const CMatrix& combiner, const std::vector<double>& angle_grid,
                 double spacing_ratio);

// Per chain and interferer: 20*log10(max desired-angle |AF| / |AF(phi_m)|).
RMatrix interferer_attenuation_db(const CMatrix& combiner, const Scenario& scenario);

struct BenchmarkResult {
  CMatrix combiner;
  CMatrix filter;
  double mse_analytic = 0.0;
  double mse_monte_carlo = 0.0;
};

// Identity combiner over all N antennas (2N ADCs), optimal digital filter.
BenchmarkResult benchmark_fully_digital(const Scenario& scenario, const AdcModel& adc,
                                        long n_trials, uint64_t seed, int threads = 1);

// Beam-steering combiner: row k is the conjugate transpose of the steering
// vector of desired angle k; remaining rows are zero.
BenchmarkResult benchmark_task_agnostic(const Scenario& scenario, const AdcModel& adc,
                                        long n_trials, uint64_t seed, int threads = 1);

// One random realization of per-VM mismatches, each parameter uniform within
// +-rel_spread of its configured mean, i.i.d. across VMs.
MismatchParams draw_mismatch_realization(const MismatchParams& means, double rel_spread,
                                         uint64_t seed);

// Analog state actually produced when the digital commands `labels` drive
// hardware whose true mismatches are `realized`.
CMatrix realize_combiner(const CMatrix& labels, const MismatchParams& realized);

struct OracleRow {
  std::string label;
  int levels = 0;
  double analytic = 0.0;
  double monte_carlo = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Closed-form vs simulated MSE for gamma / random / task-agnostic combiners
// at 8, 16, and 64 levels. Tolerance 5% (1% at 64 levels).
std::vector<OracleRow> formula_vs_mc_suite(const Scenario& scenario, long n_trials,
                                           uint64_t seed, int threads = 1);

}  // namespace hbf
