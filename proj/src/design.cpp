#include "hbf/design.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hbf {

namespace {

// Trace-regularization coefficient 2*kappa/(3 b^2 P).
double reg_coefficient(const AdcModel& adc, Eigen::Index n_chains) {
  const double b = static_cast<double>(adc.levels);
  return 2.0 * kappa(adc) / (3.0 * b * b * static_cast<double>(n_chains));
}

}  // namespace

void DesignParams::validate() const {
  if (step_size <= 0.0) throw std::invalid_argument("design: step_size must be positive");
  if (max_iters < 1) throw std::invalid_argument("design: max_iters must be >= 1");
  if (project_every < 1 || project_every > max_iters)
    throw std::invalid_argument("design: project_every must be in [1, max_iters]");
  if (int_rej_weight < 0.0 || sparsity_weight < 0.0)
    throw std::invalid_argument("design: penalty weights must be nonnegative");
  if (resolution_bits && *resolution_bits < 1)
    throw std::invalid_argument("design: resolution_bits must be >= 1");
  if (target_sparsity && (*target_sparsity < 0.0 || *target_sparsity >= 1.0))
    throw std::invalid_argument("design: target_sparsity must lie in [0, 1)");
  if (mismatch && resolution_bits && mismatch->resolution_bits != *resolution_bits)
    throw std::invalid_argument("design: mismatch resolution disagrees with resolution_bits");
}

double ex_mse(const CMatrix& a, const CovarianceBundle& bundle, const AdcModel& adc) {
  const double base = (bundle.gamma * bundle.cov_x * bundle.gamma.adjoint()).trace().real();
  const CMatrix gram = a * bundle.cov_x * a.adjoint();
  const double power = gram.trace().real();
  if (!std::isfinite(power)) return std::numeric_limits<double>::quiet_NaN();
  if (power <= 0.0) return base;  // zero combiner conveys nothing

  CMatrix m = gram;
  m.diagonal().array() += reg_coefficient(adc, a.rows()) * power;
  const CMatrix x = a * bundle.cov_x * bundle.gamma.adjoint();  // P x K
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
  const double recovered = (x.adjoint() * llt.solve(x)).trace().real();
  return base - recovered;
}

CMatrix digital_filter(const CMatrix& a, const CovarianceBundle& bundle,
                       const AdcModel& adc) {
  const Eigen::Index k = bundle.gamma.rows();
  const CMatrix gram = a * bundle.cov_x * a.adjoint();
  const double power = gram.trace().real();
  if (power <= 0.0) return CMatrix::Zero(k, a.rows());

  CMatrix m = gram;
  m.diagonal().array() += reg_coefficient(adc, a.rows()) * power;
  const CMatrix x = a * bundle.cov_x * bundle.gamma.adjoint();
  Eigen::LLT<CMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("digital_filter: regularized Gram factorization failed");
  return llt.solve(x).adjoint();
}

CMatrix ex_mse_gradient(const CMatrix& a, const CovarianceBundle& bundle,
                        const AdcModel& adc) {
  const CMatrix gram = a * bundle.cov_x * a.adjoint();
  const double power = gram.trace().real();
  if (power <= 0.0) return CMatrix::Zero(a.rows(), a.cols());

  // Envelope form: the gradient of min_B MSE(A, B) equals the partial
  // gradient of MSE at the optimal filter.
  const CMatrix b = digital_filter(a, bundle, adc);
  const double rho = reg_coefficient(adc, a.rows());
  return 2.0 * (b.adjoint() * (b * a * bundle.cov_x - bundle.cross_sx) +
                rho * b.squaredNorm() * a * bundle.cov_x);
}

double int_rej(const CMatrix& a, const CMatrix& steering_interf) {
  if (steering_interf.cols() == 0) return 0.0;
  return (a * steering_interf).cwiseAbs().maxCoeff();
}

CMatrix int_rej_subgradient(const CMatrix& a, const CMatrix& steering_interf) {
  CMatrix grad = CMatrix::Zero(a.rows(), a.cols());
  if (steering_interf.cols() == 0) return grad;
  const CMatrix response = a * steering_interf;
  Eigen::Index best_row = 0, best_col = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < response.rows(); ++i) {
    for (Eigen::Index j = 0; j < response.cols(); ++j) {
      const double mag = std::abs(response(i, j));
      if (mag > best) {
        best = mag;
        best_row = i;
        best_col = j;
      }
    }
  }
  const Complex peak = response(best_row, best_col);
  if (std::abs(peak) == 0.0) return grad;
  grad.row(best_row) =
      (peak / std::abs(peak)) * steering_interf.col(best_col).conjugate().transpose();
  return grad;
}

double loss(const CMatrix& a, const CovarianceBundle& bundle, const AdcModel& adc,
            const DesignParams& params) {
  return ex_mse(a, bundle, adc) +
         params.int_rej_weight * int_rej(a, bundle.steering_interf) +
         params.sparsity_weight * a.cwiseAbs().sum();
}

CMatrix soft_threshold(const CMatrix& z, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("soft_threshold: lambda must be >= 0");
  return z.unaryExpr([lambda](const Complex& v) {
    const double mag = std::abs(v);
    if (mag <= lambda) return Complex(0.0, 0.0);
    return v * ((mag - lambda) / mag);
  });
}

CMatrix proximal_step(const CMatrix& a, const CovarianceBundle& bundle,
                      const AdcModel& adc, const DesignParams& params) {
  CMatrix grad = ex_mse_gradient(a, bundle, adc);
  if (params.int_rej_weight > 0.0)
    grad += params.int_rej_weight * int_rej_subgradient(a, bundle.steering_interf);
  return soft_threshold(a - params.step_size * grad,
                        params.step_size * params.sparsity_weight);
}

CMatrix rescale_and_project(const CMatrix& a, const DesignParams& params,
                            CMatrix* labels) {
  double peak = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      peak = std::max(peak, std::max(std::abs(a(r, c).real()), std::abs(a(r, c).imag())));
  const CMatrix scaled = peak > 0.0 ? CMatrix(a / peak) : a;
  if (params.mismatch) return project_mismatched(scaled, *params.mismatch, labels);
  const CMatrix projected = project_ideal(scaled, params.resolution_bits.value());
  if (labels) *labels = projected;
  return projected;
}

namespace {

DesignResult run_iterations(const CovarianceBundle& bundle, const AdcModel& adc,
                            const DesignParams& params, const CMatrix& initial) {
  DesignResult result;
  CMatrix a = initial;
  CMatrix labels;
  bool projected_last = false;
  result.loss_trace.reserve(static_cast<size_t>(params.max_iters));

  for (int k = 1; k <= params.max_iters; ++k) {
    a = proximal_step(a, bundle, adc, params);
    projected_last = false;
    if (params.constrained() && k % params.project_every == 0) {
      a = rescale_and_project(a, params, &labels);
      projected_last = true;
    }
    const double current = loss(a, bundle, adc, params);
    result.loss_trace.push_back(current);
    if (!std::isfinite(current)) {
      std::ostringstream msg;
      msg << "algorithm1: non-finite loss at iteration " << k << "; trace tail:";
      const size_t n = result.loss_trace.size();
      for (size_t i = n > 5 ? n - 5 : 0; i < n; ++i) msg << ' ' << result.loss_trace[i];
      throw std::runtime_error(msg.str());
    }
  }
  if (params.constrained() && !projected_last) a = rescale_and_project(a, params, &labels);

  result.combiner = a;
  result.combiner_labels = labels;
  result.digital_filter = digital_filter(a, bundle, adc);
  result.final_ex_mse = ex_mse(a, bundle, adc);
  result.final_int_rej = int_rej(a, bundle.steering_interf);
  result.achieved_sparsity = sparsity_fraction(a);
  result.sparsity_weight_used = params.sparsity_weight;
  result.iterations = params.max_iters;
  return result;
}

// Tunes sparsity_weight so the achieved zero fraction lands in
// [target, target + 0.10]: log-scale bisection with short probe runs, then a
// full-length run (extended with full-length bisection steps if the long run
// drifts out of the band).
DesignResult run_with_target_sparsity(const CovarianceBundle& bundle, const AdcModel& adc,
                                      const DesignParams& params, const CMatrix& initial) {
  const double target = params.target_sparsity.value();
  const double band = 0.10;
  double lo = 1e-6, hi = 1e2;

  DesignParams probe = params;
  probe.target_sparsity.reset();
  // Probes need several projection cycles to see where the zeros settle.
  probe.max_iters = std::min(params.max_iters, std::max(100, 4 * params.project_every));
  probe.project_every = std::min(params.project_every, probe.max_iters);

  double chosen = hi;
  double best_excess = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 20; ++it) {
    const double mid = std::sqrt(lo * hi);
    probe.sparsity_weight = mid;
    const double achieved = run_iterations(bundle, adc, probe, initial).achieved_sparsity;
    if (achieved < target) {
      lo = mid;
    } else {
      if (achieved - target < best_excess) {
        best_excess = achieved - target;
        chosen = mid;
      }
      if (achieved <= target + band) break;
      hi = mid;
    }
  }

  DesignParams full = params;
  full.target_sparsity.reset();
  full.sparsity_weight = chosen;
  DesignResult result = run_iterations(bundle, adc, full, initial);

  // The full-length run can land outside the probe band; refine at full length.
  for (int it = 0; it < 8; ++it) {
    if (result.achieved_sparsity >= target && result.achieved_sparsity <= target + band) break;
    if (result.achieved_sparsity < target) {
      lo = full.sparsity_weight;
    } else {
      hi = full.sparsity_weight;
    }
    full.sparsity_weight = std::sqrt(lo * hi);
    result = run_iterations(bundle, adc, full, initial);
  }
  return result;
}

}  // namespace

DesignResult algorithm1(const CovarianceBundle& bundle, const AdcModel& adc,
                        const DesignParams& params, const std::optional<CMatrix>& initial) {
  params.validate();
  adc.validate();
  const CMatrix start = initial.value_or(bundle.gamma);
  if (start.cols() != bundle.cov_x.rows())
    throw std::invalid_argument("algorithm1: initial combiner has wrong column count");
  if (params.mismatch &&
      (params.mismatch->rows() != start.rows() || params.mismatch->cols() != start.cols()))
    throw std::invalid_argument("algorithm1: mismatch set dimensions disagree with combiner");

  if (params.target_sparsity)
    return run_with_target_sparsity(bundle, adc, params, start);
  return run_iterations(bundle, adc, params, start);
}

}  // namespace hbf
