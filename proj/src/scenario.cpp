#include "hbf/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace hbf {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

RVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void Scenario::validate() const {
  require(n_antennas >= 1, "scenario: n_antennas must be >= 1");
  require(n_chains >= 1, "scenario: n_chains must be >= 1");
  require(n_chains <= n_antennas, "scenario: n_chains must not exceed n_antennas");
  require(!desired_angles.empty(), "scenario: at least one desired source required");
  require(desired_angles.size() == desired_variances.size(),
          "scenario: desired angle/variance lengths differ");
  require(interferer_angles.size() == interferer_variances.size(),
          "scenario: interferer angle/variance lengths differ");
  require(noise_variance > 0.0, "scenario: noise_variance must be positive");
  require(spacing_ratio > 0.0, "scenario: spacing_ratio must be positive");
  for (double v : desired_variances) require(v > 0.0, "scenario: desired variance must be positive");
  for (double v : interferer_variances)
    require(v > 0.0, "scenario: interferer variance must be positive");
  for (double a : desired_angles)
    require(a > -kPi / 2 && a < kPi / 2, "scenario: desired angle outside (-pi/2, pi/2)");
  for (double a : interferer_angles)
    require(a > -kPi / 2 && a < kPi / 2, "scenario: interferer angle outside (-pi/2, pi/2)");
}

Scenario Scenario::with_desired_angles(const std::vector<double>& angles) const {
  Scenario s = *this;
  s.desired_angles = angles;
  return s;
}

Scenario Scenario::with_noise_variance(double noise) const {
  Scenario s = *this;
  s.noise_variance = noise;
  return s;
}

CVector steering_vector(double angle, int n_antennas, double spacing_ratio) {
  if (n_antennas < 1) throw std::invalid_argument("steering_vector: n_antennas must be >= 1");
  CVector a(n_antennas);
  const double phase_step = -2.0 * kPi * spacing_ratio * std::sin(angle);
  for (int n = 0; n < n_antennas; ++n) a(n) = std::polar(1.0, phase_step * n);
  return a;
}

CMatrix steering_matrix(const std::vector<double>& angles, int n_antennas,
                        double spacing_ratio) {
  CMatrix m(n_antennas, static_cast<Eigen::Index>(angles.size()));
  for (Eigen::Index k = 0; k < m.cols(); ++k)
    m.col(k) = steering_vector(angles[static_cast<size_t>(k)], n_antennas, spacing_ratio);
  return m;
}

CovarianceBundle build_covariances(const Scenario& sc) {
  sc.validate();
  const int n = sc.n_antennas;
  CovarianceBundle b;
  b.steering_desired = steering_matrix(sc.desired_angles, n, sc.spacing_ratio);
  b.steering_interf = steering_matrix(sc.interferer_angles, n, sc.spacing_ratio);

  const RVector cs = to_vector(sc.desired_variances);
  CMatrix cov = b.steering_desired * cs.asDiagonal() * b.steering_desired.adjoint();
  if (sc.n_interferers() > 0) {
    const RVector cv = to_vector(sc.interferer_variances);
    cov += b.steering_interf * cv.asDiagonal() * b.steering_interf.adjoint();
  }
  cov.diagonal().array() += sc.noise_variance;
  // Force exact Hermitian symmetry; downstream code and tests rely on it.
  for (int i = 0; i < n; ++i) {
    cov(i, i) = Complex(cov(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) cov(j, i) = std::conj(cov(i, j));
  }
  b.cov_x = std::move(cov);

  b.cross_sx = cs.asDiagonal() * b.steering_desired.adjoint();

  Eigen::LLT<CMatrix> llt(b.cov_x);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("build_covariances: cov_x factorization failed");
  b.gamma = llt.solve(b.cross_sx.adjoint()).adjoint();
  return b;
}

double mmse_floor(const CovarianceBundle& bundle, const Scenario& scenario) {
  double tr_cs = 0.0;
  for (double v : scenario.desired_variances) tr_cs += v;
  const double recovered =
      (bundle.gamma * bundle.cov_x * bundle.gamma.adjoint()).trace().real();
  return tr_cs - recovered;
}

SampleSet sample_received(const Scenario& sc, long n_trials, uint64_t seed) {
  sc.validate();
  if (n_trials < 1) throw std::invalid_argument("sample_received: n_trials must be >= 1");
  auto rng = make_rng(seed);

  const int k = sc.n_desired();
  const int m = sc.n_interferers();
  SampleSet out;
  out.desired.resize(k, n_trials);
  out.received.resize(sc.n_antennas, n_trials);

  CMatrix interf(m, n_trials);
  CMatrix noise(sc.n_antennas, n_trials);
  fill_complex_gaussian(out.desired, to_vector(sc.desired_variances), rng);
  if (m > 0) fill_complex_gaussian(interf, to_vector(sc.interferer_variances), rng);
  fill_complex_gaussian(noise, RVector::Constant(sc.n_antennas, sc.noise_variance), rng);

  const CMatrix m_theta = steering_matrix(sc.desired_angles, sc.n_antennas, sc.spacing_ratio);
  out.received = m_theta * out.desired + noise;
  if (m > 0) {
    const CMatrix m_phi = steering_matrix(sc.interferer_angles, sc.n_antennas, sc.spacing_ratio);
    out.received += m_phi * interf;
  }
  return out;
}

double snr_to_noise(const std::vector<double>& desired_variances, double snr_db) {
  if (desired_variances.empty())
    throw std::invalid_argument("snr_to_noise: need at least one desired variance");
  double mean = 0.0;
  for (double v : desired_variances) mean += v;
  mean /= static_cast<double>(desired_variances.size());
  return mean / std::pow(10.0, snr_db / 10.0);
}

}  // namespace hbf
