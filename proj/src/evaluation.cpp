#include "hbf/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace hbf {

namespace {

constexpr long kChunkTrials = 8192;

RVector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Runs fn(chunk_index) over [0, n_chunks) on up to `threads` workers.
void parallel_chunks(long n_chunks, int threads, const std::function<void(long)>& fn) {
  const int workers = static_cast<int>(std::max<long>(1, std::min<long>(threads, n_chunks)));
  if (workers == 1) {
    for (long c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const long c = next.fetch_add(1);
        if (c >= n_chunks) break;
        fn(c);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void PowerProfile::validate() const {
  if (p_lna < 0 || p_vm < 0 || p_mix < 0 || p_bb < 0 || p_adc < 0)
    throw std::invalid_argument("power: component powers must be >= 0");
  if (sparsity_coeff < 0.0 || sparsity_coeff > 1.0)
    throw std::invalid_argument("power: sparsity_coeff must lie in [0, 1]");
}

double power_fully_digital(int n_antennas, const PowerProfile& p) {
  p.validate();
  const double n = static_cast<double>(n_antennas);
  return n * p.p_lna + n * p.p_mix + 2.0 * n * p.p_bb + 2.0 * n * p.p_adc;
}

double power_hybrid(int n_antennas, int n_chains, const PowerProfile& p) {
  p.validate();
  const double n = static_cast<double>(n_antennas);
  const double chains = static_cast<double>(n_chains);
  return p.sparsity_coeff * n * chains * p.p_vm + chains * p.p_mix +
         2.0 * chains * p.p_bb + 2.0 * chains * p.p_adc;
}

double monte_carlo_mse(const CMatrix& a, const CMatrix& b, const Scenario& scenario,
                       const AdcModel& adc, long n_trials, uint64_t seed, int threads) {
  scenario.validate();
  adc.validate();
  if (n_trials < 1) throw std::invalid_argument("monte_carlo_mse: n_trials must be >= 1");
  if (a.cols() != scenario.n_antennas)
    throw std::invalid_argument("monte_carlo_mse: combiner column count mismatch");

  const CovarianceBundle bundle = build_covariances(scenario);
  const double power = (a * bundle.cov_x * a.adjoint()).trace().real();
  const bool quantize = power > 0.0;
  const double dyn =
      quantize ? dynamic_range(adc, power / (2.0 * static_cast<double>(a.rows()))) : 0.0;

  const CMatrix m_theta =
      steering_matrix(scenario.desired_angles, scenario.n_antennas, scenario.spacing_ratio);
  const CMatrix m_phi = steering_matrix(scenario.interferer_angles, scenario.n_antennas,
                                        scenario.spacing_ratio);
  const RVector var_s = to_vector(scenario.desired_variances);
  const RVector var_v = to_vector(scenario.interferer_variances);
  const RVector var_w = RVector::Constant(scenario.n_antennas, scenario.noise_variance);

  const long n_chunks = (n_trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<double> partial(static_cast<size_t>(n_chunks), 0.0);

  parallel_chunks(n_chunks, threads, [&](long c) {
    const long count = std::min(kChunkTrials, n_trials - c * kChunkTrials);
    auto rng = make_rng(derive_seed(seed, static_cast<uint64_t>(c)));
    CMatrix s(m_theta.cols(), count);
    CMatrix v(m_phi.cols(), count);
    CMatrix w(scenario.n_antennas, count);
    fill_complex_gaussian(s, var_s, rng);
    if (v.rows() > 0) fill_complex_gaussian(v, var_v, rng);
    fill_complex_gaussian(w, var_w, rng);
    CMatrix x = m_theta * s + w;
    if (v.rows() > 0) x += m_phi * v;
    CMatrix z = a * x;
    if (quantize) {
      for (Eigen::Index t = 0; t < z.cols(); ++t)
        z.col(t) = adc_convert(z.col(t), adc, dyn, rng);
    } else {
      z.setZero();
    }
    partial[static_cast<size_t>(c)] = (s - b * z).squaredNorm();
  });

  double total = 0.0;
  for (double p : partial) total += p;  // fixed reduction order
  return total / static_cast<double>(n_trials);
}

Complex array_factor(const CMatrix& a, int chain, double angle, double spacing_ratio) {
  if (chain < 0 || chain >= a.rows())
    throw std::invalid_argument("array_factor: chain index out of range");
  const CVector steer = steering_vector(angle, static_cast<int>(a.cols()), spacing_ratio);
  return (a.row(chain) * steer).value();
}

AfTable af_sweep(const CMatrix& a, const std::vector<double>& angle_grid,
                 double spacing_ratio) {
  if (angle_grid.empty()) throw std::invalid_argument("af_sweep: empty angle grid");
  AfTable table;
  table.angles = angle_grid;
  table.gains.resize(a.rows(), static_cast<Eigen::Index>(angle_grid.size()));
  for (size_t i = 0; i < angle_grid.size(); ++i) {
    const CVector steer =
        steering_vector(angle_grid[i], static_cast<int>(a.cols()), spacing_ratio);
    table.gains.col(static_cast<Eigen::Index>(i)) = a * steer;
  }
  return table;
}

RMatrix interferer_attenuation_db(const CMatrix& a, const Scenario& scenario) {
  const int chains = static_cast<int>(a.rows());
  const int m = scenario.n_interferers();
  RMatrix atten(chains, m);
  for (int p = 0; p < chains; ++p) {
    double peak = 0.0;
    for (double theta : scenario.desired_angles)
      peak = std::max(peak, std::abs(array_factor(a, p, theta, scenario.spacing_ratio)));
    for (int j = 0; j < m; ++j) {
      const double interf =
          std::abs(array_factor(a, p, scenario.interferer_angles[static_cast<size_t>(j)],
                                scenario.spacing_ratio));
      atten(p, j) = 20.0 * std::log10(peak / interf);
    }
  }
  return atten;
}

BenchmarkResult benchmark_fully_digital(const Scenario& scenario, const AdcModel& adc,
                                        long n_trials, uint64_t seed, int threads) {
  const CovarianceBundle bundle = build_covariances(scenario);
  BenchmarkResult r;
  r.combiner = CMatrix::Identity(scenario.n_antennas, scenario.n_antennas);
  r.filter = digital_filter(r.combiner, bundle, adc);
  r.mse_analytic = mmse_floor(bundle, scenario) + ex_mse(r.combiner, bundle, adc);
  r.mse_monte_carlo =
      monte_carlo_mse(r.combiner, r.filter, scenario, adc, n_trials, seed, threads);
  return r;
}

BenchmarkResult benchmark_task_agnostic(const Scenario& scenario, const AdcModel& adc,
                                        long n_trials, uint64_t seed, int threads) {
  if (scenario.n_chains < scenario.n_desired())
    throw std::invalid_argument("benchmark_task_agnostic: needs n_chains >= n_desired");
  const CovarianceBundle bundle = build_covariances(scenario);
  BenchmarkResult r;
  r.combiner = CMatrix::Zero(scenario.n_chains, scenario.n_antennas);
  for (int k = 0; k < scenario.n_desired(); ++k)
    r.combiner.row(k) = steering_vector(scenario.desired_angles[static_cast<size_t>(k)],
                                        scenario.n_antennas, scenario.spacing_ratio)
                            .adjoint();
  r.filter = digital_filter(r.combiner, bundle, adc);
  r.mse_analytic = mmse_floor(bundle, scenario) + ex_mse(r.combiner, bundle, adc);
  r.mse_monte_carlo =
      monte_carlo_mse(r.combiner, r.filter, scenario, adc, n_trials, seed, threads);
  return r;
}

MismatchParams draw_mismatch_realization(const MismatchParams& means, double rel_spread,
                                         uint64_t seed) {
  means.validate();
  if (rel_spread < 0.0)
    throw std::invalid_argument("draw_mismatch_realization: rel_spread must be >= 0");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  MismatchParams out = means;
  for (RMatrix* field : {&out.i_gain, &out.i_phase, &out.q_gain, &out.q_phase,
                         &out.out_gain, &out.out_phase}) {
    for (Eigen::Index r = 0; r < field->rows(); ++r)
      for (Eigen::Index c = 0; c < field->cols(); ++c)
        (*field)(r, c) *= 1.0 + rel_spread * unit(rng);
  }
  return out;
}

CMatrix realize_combiner(const CMatrix& labels, const MismatchParams& realized) {
  if (labels.rows() != realized.i_gain.rows() || labels.cols() != realized.i_gain.cols())
    throw std::invalid_argument("realize_combiner: label/mismatch dimensions differ");
  const auto [ci, cq] = mismatch_coefficients(realized);
  CMatrix out(labels.rows(), labels.cols());
  for (Eigen::Index r = 0; r < labels.rows(); ++r)
    for (Eigen::Index c = 0; c < labels.cols(); ++c)
      out(r, c) = ci(r, c) * labels(r, c).real() + cq(r, c) * labels(r, c).imag();
  return out;
}

std::vector<OracleRow> formula_vs_mc_suite(const Scenario& scenario, long n_trials,
                                           uint64_t seed, int threads) {
  const CovarianceBundle bundle = build_covariances(scenario);
  const double floor = mmse_floor(bundle, scenario);

  std::vector<std::pair<std::string, CMatrix>> combiners;
  combiners.emplace_back("gamma", bundle.gamma);
  {
    auto rng = make_rng(derive_seed(seed, 9000));
    CMatrix random(scenario.n_chains, scenario.n_antennas);
    fill_complex_gaussian(random, RVector::Constant(scenario.n_chains, 2.0), rng);
    combiners.emplace_back("random", std::move(random));
  }
  {
    CMatrix ta = CMatrix::Zero(scenario.n_chains, scenario.n_antennas);
    for (int k = 0; k < std::min(scenario.n_desired(), scenario.n_chains); ++k)
      ta.row(k) = steering_vector(scenario.desired_angles[static_cast<size_t>(k)],
                                  scenario.n_antennas, scenario.spacing_ratio)
                      .adjoint();
    combiners.emplace_back("task-agnostic", std::move(ta));
  }

  std::vector<OracleRow> rows;
  uint64_t stream = 0;
  for (const int levels : {8, 16, 64}) {
    AdcModel adc;
    adc.levels = levels;
    for (const auto& [label, a] : combiners) {
      OracleRow row;
      row.label = label;
      row.levels = levels;
      row.analytic = floor + ex_mse(a, bundle, adc);
      const CMatrix b = digital_filter(a, bundle, adc);
      row.monte_carlo = monte_carlo_mse(a, b, scenario, adc, n_trials,
                                        derive_seed(seed, ++stream), threads);
      row.rel_error = std::abs(row.monte_carlo - row.analytic) / row.analytic;
      row.tolerance = levels >= 64 ? 0.01 : 0.05;
      row.pass = row.rel_error < row.tolerance;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace hbf
