#pragma once

#include <optional>
#include <vector>

#include "hbf/design.hpp"

namespace hbf {

// Box uncertainty around the nominal desired-source angles, discretized by a
// per-axis grid for the minimax surrogate.
struct UncertaintyModel {
  std::vector<double> nominal_angles;
  double margin = 0.0;  // radians
  int grid_per_axis = 3;

  void validate() const;
};

struct RobustParams {
  DesignParams design;          // int_rej/sparsity weights, constellation
  double barrier_weight = 1e-2;  // mu_h
  double step_combiner = 1e-2;   // mu_A
  double step_filter = 1e-2;     // mu_B
  int inner_iters = 20;
  int outer_iters = 200;
  int project_every = 10;

  void validate() const;
};

// Grid points spanning the uncertainty box, one per-axis sweep per desired
// angle, Cartesian product across angles. Collapses to the nominal point
// when the margin is zero.
std::vector<std::vector<double>> aoa_grid(const UncertaintyModel& model);

// Full recovery MSE of the pair (A, B) when the desired sources sit at the
// supplied angles; covariances are rebuilt at those angles.
double mse_full(const CMatrix& combiner, const CMatrix& filter,
                const std::vector<double>& angles, const Scenario& scenario,
                const AdcModel& adc);

// Same, with the angle-dependent covariances precomputed by the caller.
double mse_full_from_bundle(const CMatrix& combiner, const CMatrix& filter,
                            const CovarianceBundle& bundle,
                            const std::vector<double>& desired_variances,
                            const AdcModel& adc);

// mse_full plus the interferer and sparsity penalties.
double robust_loss(const CMatrix& combiner, const CMatrix& filter,
                   const std::vector<double>& angles, const Scenario& scenario,
                   const AdcModel& adc, const RobustParams& params);

// Log-barrier relaxation of the epigraph form of the worst-case problem.
// Returns nullopt when (combiner, filter, slack) is infeasible (some grid
// MSE reaches the slack level).
std::optional<double> barrier(const CMatrix& combiner, double slack, const CMatrix& filter,
                              const std::vector<std::vector<double>>& grid,
                              const Scenario& scenario, const AdcModel& adc,
                              const RobustParams& params);

struct RobustStep {
  CMatrix value;   // updated combiner or filter
  double slack;    // updated slack
  bool stalled;    // backtracking could not restore strict feasibility
};

// One proximal-gradient step on (combiner, slack) of the barrier's smooth
// part, followed by soft-thresholding of the combiner; the step size is
// halved (up to 30 times) until the new point is strictly feasible.
RobustStep step_combiner(const CMatrix& combiner, double slack, const CMatrix& filter,
                         const std::vector<CovarianceBundle>& grid_bundles,
                         const std::vector<double>& desired_variances,
                         const CMatrix& steering_interf, const AdcModel& adc,
                         const RobustParams& params);

// One gradient step on (filter, slack); no thresholding.
RobustStep step_filter(const CMatrix& combiner, double slack, const CMatrix& filter,
                       const std::vector<CovarianceBundle>& grid_bundles,
                       const std::vector<double>& desired_variances,
                       const AdcModel& adc, const RobustParams& params);

// Gradients of the smooth barrier part, exposed for finite-difference checks.
// Each returns the matrix gradient and the slack partial derivative.
std::pair<CMatrix, double> barrier_gradient_combiner(
    const CMatrix& combiner, double slack, const CMatrix& filter,
    const std::vector<CovarianceBundle>& grid_bundles,
    const std::vector<double>& desired_variances, const CMatrix& steering_interf,
    const AdcModel& adc, const RobustParams& params);
std::pair<CMatrix, double> barrier_gradient_filter(
    const CMatrix& combiner, double slack, const CMatrix& filter,
    const std::vector<CovarianceBundle>& grid_bundles,
    const std::vector<double>& desired_variances, const AdcModel& adc,
    const RobustParams& params);

// Alternating barrier descent over combiner and filter with periodic
// constellation projection; minimizes the worst-case loss over the grid.
DesignResult algorithm2(const Scenario& scenario, const AdcModel& adc,
                        const UncertaintyModel& uncertainty, const RobustParams& params,
                        const std::optional<CMatrix>& initial_combiner = std::nullopt,
                        const std::optional<CMatrix>& initial_filter = std::nullopt);

// Random angle draws inside the uncertainty box (uniform per axis, seeded).
std::vector<std::vector<double>> draw_aoas(const UncertaintyModel& model, int n_draws,
                                           uint64_t seed);

// Largest mse_full over the supplied angle sets.
double worst_case_mse(const CMatrix& combiner, const CMatrix& filter,
                      const Scenario& scenario, const AdcModel& adc,
                      const std::vector<std::vector<double>>& angle_sets);

}  // namespace hbf
