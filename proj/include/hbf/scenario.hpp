#pragma once

#include <cstdint>
#include <vector>

#include "hbf/common.hpp"

namespace hbf {

// Narrowband far-field scene: a uniform linear array observing K desired
// sources and M interferers in white noise. Angles are radians from
// broadside, variances are per-source signal powers.
struct Scenario {
  int n_antennas = 8;
  int n_chains = 2;
  std::vector<double> desired_angles;
  std::vector<double> desired_variances;
  std::vector<double> interferer_angles;
  std::vector<double> interferer_variances;
  double noise_variance = 1.0;
  double spacing_ratio = 0.5;  // element spacing over wavelength

  int n_desired() const { return static_cast<int>(desired_angles.size()); }
  int n_interferers() const { return static_cast<int>(interferer_angles.size()); }

  // Throws std::invalid_argument on any violated constraint.
  void validate() const;

  Scenario with_desired_angles(const std::vector<double>& angles) const;
  Scenario with_noise_variance(double noise) const;
};

// Steering vector of a uniform linear array; entry n is
// exp(-j*2*pi*n*spacing_ratio*sin(angle)), so entry 0 is always 1.
CVector steering_vector(double angle, int n_antennas, double spacing_ratio);

// Columns are steering vectors of the given angles.
CMatrix steering_matrix(const std::vector<double>& angles, int n_antennas,
                        double spacing_ratio);

// Second-order statistics of the received signal and its correlation with
// the desired sources, plus the steering matrices they were built from.
// `gamma` is the linear MMSE estimation matrix cross_sx * cov_x^{-1}.
struct CovarianceBundle {
  CMatrix cov_x;             // N x N, Hermitian positive definite
  CMatrix cross_sx;          // K x N
  CMatrix gamma;             // K x N
  CMatrix steering_desired;  // N x K
  CMatrix steering_interf;   // N x M
};

CovarianceBundle build_covariances(const Scenario& scenario);

// Unquantized fully-digital MSE lower bound: Tr(C_s) - Tr(gamma C_x gamma^H).
double mmse_floor(const CovarianceBundle& bundle, const Scenario& scenario);

struct SampleSet {
  CMatrix desired;   // K x n_trials
  CMatrix received;  // N x n_trials
};

// Draws paired (s, x) samples of the signal model; deterministic given seed.
SampleSet sample_received(const Scenario& scenario, long n_trials, uint64_t seed);

// Noise variance from an SNR defined against the mean desired-source power.
double snr_to_noise(const std::vector<double>& desired_variances, double snr_db);

}  // namespace hbf
