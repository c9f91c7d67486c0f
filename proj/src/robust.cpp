#include "hbf/robust.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hbf {

namespace {

double reg_coefficient(const AdcModel& adc, Eigen::Index n_chains) {
  const double b = static_cast<double>(adc.levels);
  return 2.0 * kappa(adc) / (3.0 * b * b * static_cast<double>(n_chains));
}

double l1_norm(const CMatrix& a) { return a.cwiseAbs().sum(); }

std::vector<CovarianceBundle> bundles_for_grid(const Scenario& scenario,
                                               const std::vector<std::vector<double>>& grid) {
  std::vector<CovarianceBundle> bundles;
  bundles.reserve(grid.size());
  for (const auto& angles : grid)
    bundles.push_back(build_covariances(scenario.with_desired_angles(angles)));
  return bundles;
}

double max_grid_mse(const CMatrix& a, const CMatrix& b,
                    const std::vector<CovarianceBundle>& bundles,
                    const std::vector<double>& variances, const AdcModel& adc) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& bundle : bundles)
    worst = std::max(worst, mse_full_from_bundle(a, b, bundle, variances, adc));
  return worst;
}

bool strictly_feasible(const CMatrix& a, const CMatrix& b, double slack,
                       const std::vector<CovarianceBundle>& bundles,
                       const std::vector<double>& variances, const AdcModel& adc) {
  for (const auto& bundle : bundles) {
    const double m = mse_full_from_bundle(a, b, bundle, variances, adc);
    if (!(slack - m > 0.0) || !std::isfinite(m)) return false;
  }
  return true;
}

// Gradient of mse_full with respect to the combiner at a fixed filter.
CMatrix mse_grad_combiner(const CMatrix& a, const CMatrix& b, const CovarianceBundle& bundle,
                          const AdcModel& adc) {
  const double rho = reg_coefficient(adc, a.rows());
  return 2.0 * (b.adjoint() * (b * a * bundle.cov_x - bundle.cross_sx) +
                rho * b.squaredNorm() * a * bundle.cov_x);
}

// Gradient of mse_full with respect to the filter at a fixed combiner.
CMatrix mse_grad_filter(const CMatrix& a, const CMatrix& b, const CovarianceBundle& bundle,
                        const AdcModel& adc) {
  const CMatrix gram = a * bundle.cov_x * a.adjoint();
  const double power = gram.trace().real();
  CMatrix m = gram;
  m.diagonal().array() += reg_coefficient(adc, a.rows()) * power;
  return 2.0 * (b * m - bundle.cross_sx * a.adjoint());
}

}  // namespace

void UncertaintyModel::validate() const {
  if (nominal_angles.empty())
    throw std::invalid_argument("uncertainty: nominal_angles must be non-empty");
  if (margin < 0.0) throw std::invalid_argument("uncertainty: margin must be >= 0");
  if (grid_per_axis < 1) throw std::invalid_argument("uncertainty: grid_per_axis must be >= 1");
}

void RobustParams::validate() const {
  design.validate();
  if (barrier_weight <= 0.0 || step_combiner <= 0.0 || step_filter <= 0.0)
    throw std::invalid_argument("robust: barrier weight and step sizes must be positive");
  if (inner_iters < 1 || outer_iters < 1 || project_every < 1)
    throw std::invalid_argument("robust: iteration counts must be >= 1");
}

std::vector<std::vector<double>> aoa_grid(const UncertaintyModel& model) {
  model.validate();
  if (model.margin == 0.0) return {model.nominal_angles};

  const int k = static_cast<int>(model.nominal_angles.size());
  const int g = model.grid_per_axis;
  std::vector<std::vector<double>> axes(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double center = model.nominal_angles[static_cast<size_t>(i)];
    auto& axis = axes[static_cast<size_t>(i)];
    if (g == 1) {
      axis = {center};
      continue;
    }
    axis.resize(static_cast<size_t>(g));
    const double step = 2.0 * model.margin / static_cast<double>(g - 1);
    for (int j = 0; j < g; ++j) axis[static_cast<size_t>(j)] = center - model.margin + j * step;
    if (g % 2 == 1) axis[static_cast<size_t>(g / 2)] = center;  // exact center
  }

  std::vector<std::vector<double>> grid;
  std::vector<double> point(static_cast<size_t>(k));
  std::vector<int> idx(static_cast<size_t>(k), 0);
  while (true) {
    for (int i = 0; i < k; ++i)
      point[static_cast<size_t>(i)] = axes[static_cast<size_t>(i)][static_cast<size_t>(
          idx[static_cast<size_t>(i)])];
    grid.push_back(point);
    int axis = k - 1;
    while (axis >= 0 && ++idx[static_cast<size_t>(axis)] == g) {
      idx[static_cast<size_t>(axis)] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return grid;
}

double mse_full_from_bundle(const CMatrix& a, const CMatrix& b,
                            const CovarianceBundle& bundle,
                            const std::vector<double>& desired_variances,
                            const AdcModel& adc) {
  double tr_cs = 0.0;
  for (double v : desired_variances) tr_cs += v;
  const CMatrix gram = a * bundle.cov_x * a.adjoint();
  const double power = gram.trace().real();
  const double cross = (bundle.cross_sx * a.adjoint() * b.adjoint()).trace().real();
  const double quad = (b * gram * b.adjoint()).trace().real();
  const double rho = reg_coefficient(adc, a.rows());
  return tr_cs - 2.0 * cross + quad + rho * power * b.squaredNorm();
}

double mse_full(const CMatrix& a, const CMatrix& b, const std::vector<double>& angles,
                const Scenario& scenario, const AdcModel& adc) {
  const CovarianceBundle bundle = build_covariances(scenario.with_desired_angles(angles));
  return mse_full_from_bundle(a, b, bundle, scenario.desired_variances, adc);
}

double robust_loss(const CMatrix& a, const CMatrix& b, const std::vector<double>& angles,
                   const Scenario& scenario, const AdcModel& adc,
                   const RobustParams& params) {
  const CovarianceBundle bundle = build_covariances(scenario.with_desired_angles(angles));
  return mse_full_from_bundle(a, b, bundle, scenario.desired_variances, adc) +
         params.design.int_rej_weight * int_rej(a, bundle.steering_interf) +
         params.design.sparsity_weight * l1_norm(a);
}

std::optional<double> barrier(const CMatrix& a, double slack, const CMatrix& b,
                              const std::vector<std::vector<double>>& grid,
                              const Scenario& scenario, const AdcModel& adc,
                              const RobustParams& params) {
  const auto bundles = bundles_for_grid(scenario, grid);
  double value = slack;
  for (const auto& bundle : bundles) {
    const double arg =
        slack - mse_full_from_bundle(a, b, bundle, scenario.desired_variances, adc);
    if (!(arg > 0.0)) return std::nullopt;
    value -= params.barrier_weight * std::log(arg);
  }
  value += params.design.int_rej_weight * int_rej(a, bundles.front().steering_interf);
  value += params.design.sparsity_weight * l1_norm(a);
  return value;
}

std::pair<CMatrix, double> barrier_gradient_combiner(
    const CMatrix& a, double slack, const CMatrix& b,
    const std::vector<CovarianceBundle>& grid_bundles,
    const std::vector<double>& desired_variances, const CMatrix& steering_interf,
    const AdcModel& adc, const RobustParams& params) {
  CMatrix grad = CMatrix::Zero(a.rows(), a.cols());
  double slack_grad = 1.0;
  for (const auto& bundle : grid_bundles) {
    const double gap = slack - mse_full_from_bundle(a, b, bundle, desired_variances, adc);
    const double w = params.barrier_weight / gap;
    grad += w * mse_grad_combiner(a, b, bundle, adc);
    slack_grad -= w;
  }
  if (params.design.int_rej_weight > 0.0)
    grad += params.design.int_rej_weight * int_rej_subgradient(a, steering_interf);
  return {std::move(grad), slack_grad};
}

std::pair<CMatrix, double> barrier_gradient_filter(
    const CMatrix& a, double slack, const CMatrix& b,
    const std::vector<CovarianceBundle>& grid_bundles,
    const std::vector<double>& desired_variances, const AdcModel& adc,
    const RobustParams& params) {
  CMatrix grad = CMatrix::Zero(b.rows(), b.cols());
  double slack_grad = 1.0;
  for (const auto& bundle : grid_bundles) {
    const double gap = slack - mse_full_from_bundle(a, b, bundle, desired_variances, adc);
    const double w = params.barrier_weight / gap;
    grad += w * mse_grad_filter(a, b, bundle, adc);
    slack_grad -= w;
  }
  return {std::move(grad), slack_grad};
}

RobustStep step_combiner(const CMatrix& a, double slack, const CMatrix& b,
                         const std::vector<CovarianceBundle>& grid_bundles,
                         const std::vector<double>& desired_variances,
                         const CMatrix& steering_interf, const AdcModel& adc,
                         const RobustParams& params) {
  if (!strictly_feasible(a, b, slack, grid_bundles, desired_variances, adc))
    return {a, slack, true};
  const auto [grad, slack_grad] = barrier_gradient_combiner(
      a, slack, b, grid_bundles, desired_variances, steering_interf, adc, params);
  double mu = params.step_combiner;
  for (int bt = 0; bt <= 30; ++bt) {
    const CMatrix next =
        soft_threshold(a - mu * grad, mu * params.design.sparsity_weight);
    const double next_slack = slack - mu * slack_grad;
    if (strictly_feasible(next, b, next_slack, grid_bundles, desired_variances, adc))
      return {next, next_slack, false};
    mu *= 0.5;
  }
  return {a, slack, true};
}

RobustStep step_filter(const CMatrix& a, double slack, const CMatrix& b,
                       const std::vector<CovarianceBundle>& grid_bundles,
                       const std::vector<double>& desired_variances, const AdcModel& adc,
                       const RobustParams& params) {
  if (!strictly_feasible(a, b, slack, grid_bundles, desired_variances, adc))
    return {b, slack, true};
  const auto [grad, slack_grad] = barrier_gradient_filter(
      a, slack, b, grid_bundles, desired_variances, adc, params);
  double mu = params.step_filter;
  for (int bt = 0; bt <= 30; ++bt) {
    const CMatrix next = b - mu * grad;
    const double next_slack = slack - mu * slack_grad;
    if (strictly_feasible(a, next, next_slack, grid_bundles, desired_variances, adc))
      return {next, next_slack, false};
    mu *= 0.5;
  }
  return {b, slack, true};
}

DesignResult algorithm2(const Scenario& scenario, const AdcModel& adc,
                        const UncertaintyModel& uncertainty, const RobustParams& params,
                        const std::optional<CMatrix>& initial_combiner,
                        const std::optional<CMatrix>& initial_filter) {
  params.validate();
  uncertainty.validate();
  adc.validate();

  const CovarianceBundle nominal = build_covariances(scenario);
  CMatrix a = initial_combiner.value_or(nominal.gamma);
  CMatrix b = initial_filter.value_or(digital_filter(a, nominal, adc));
  CMatrix labels;

  const auto grid = aoa_grid(uncertainty);
  const auto bundles = bundles_for_grid(scenario, grid);
  const auto& variances = scenario.desired_variances;
  const CMatrix& steering_interf = nominal.steering_interf;

  const auto max_robust_loss = [&]() {
    const double penalties = params.design.int_rej_weight * int_rej(a, steering_interf) +
                             params.design.sparsity_weight * l1_norm(a);
    return max_grid_mse(a, b, bundles, variances, adc) + penalties;
  };
  // Initializing the slack exactly at the loss maximum puts the barrier on
  // its singularity, so every outer pass starts with a strict margin.
  const auto lift_slack = [](double level) { return level + 0.1 * (1.0 + level); };

  DesignResult result;
  result.loss_trace.reserve(static_cast<size_t>(params.outer_iters));
  bool projected_last = false;

  for (int k = 1; k <= params.outer_iters; ++k) {
    const double level = max_robust_loss();
    if (!std::isfinite(level)) {
      std::ostringstream msg;
      msg << "algorithm2: non-finite worst-case loss at outer iteration " << k;
      throw std::runtime_error(msg.str());
    }
    double slack = lift_slack(level);

    for (int l = 0; l < params.inner_iters; ++l) {
      const RobustStep step = step_combiner(a, slack, b, bundles, variances,
                                            steering_interf, adc, params);
      a = step.value;
      slack = step.slack;
      if (step.stalled) break;
    }

    projected_last = false;
    if (params.design.constrained() && k % params.project_every == 0) {
      a = rescale_and_project(a, params.design, &labels);
      projected_last = true;
      const double post = max_grid_mse(a, b, bundles, variances, adc);
      if (!(slack > post)) slack = lift_slack(post);
    }

    for (int l = 0; l < params.inner_iters; ++l) {
      const RobustStep step =
          step_filter(a, slack, b, bundles, variances, adc, params);
      b = step.value;
      slack = step.slack;
      if (step.stalled) break;
    }

    result.loss_trace.push_back(max_grid_mse(a, b, bundles, variances, adc));
  }

  if (params.design.constrained() && !projected_last) {
    a = rescale_and_project(a, params.design, &labels);
    double slack = lift_slack(max_grid_mse(a, b, bundles, variances, adc));
    for (int l = 0; l < params.inner_iters; ++l) {
      const RobustStep step =
          step_filter(a, slack, b, bundles, variances, adc, params);
      b = step.value;
      slack = step.slack;
      if (step.stalled) break;
    }
  }

  result.combiner = a;
  result.combiner_labels = labels;
  result.digital_filter = b;
  result.final_ex_mse = ex_mse(a, nominal, adc);
  result.final_int_rej = int_rej(a, steering_interf);
  result.achieved_sparsity = sparsity_fraction(a);
  result.sparsity_weight_used = params.design.sparsity_weight;
  result.iterations = params.outer_iters;
  result.worst_case_mse = max_grid_mse(a, b, bundles, variances, adc);
  result.nominal_mse =
      mse_full_from_bundle(a, b, nominal, variances, adc);
  return result;
}

std::vector<std::vector<double>> draw_aoas(const UncertaintyModel& model, int n_draws,
                                           uint64_t seed) {
  model.validate();
  if (n_draws < 1) throw std::invalid_argument("draw_aoas: n_draws must be >= 1");
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<double>> draws(static_cast<size_t>(n_draws));
  for (auto& point : draws) {
    point.resize(model.nominal_angles.size());
    for (size_t k = 0; k < point.size(); ++k)
      point[k] = model.nominal_angles[k] + model.margin * unit(rng);
  }
  return draws;
}

double worst_case_mse(const CMatrix& a, const CMatrix& b, const Scenario& scenario,
                      const AdcModel& adc,
                      const std::vector<std::vector<double>>& angle_sets) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& angles : angle_sets)
    worst = std::max(worst, mse_full(a, b, angles, scenario, adc));
  return worst;
}

}  // namespace hbf
