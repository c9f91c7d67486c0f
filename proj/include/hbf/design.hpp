#pragma once

#include <optional>
#include <vector>

#include "hbf/quantization.hpp"
#include "hbf/scenario.hpp"
#include "hbf/vm_constellation.hpp"

namespace hbf {

struct DesignParams {
  double int_rej_weight = 1.0;    // weight on the interferer max-gain penalty
  double sparsity_weight = 0.0;   // weight on the entry-wise l1 norm
  double step_size = 1e-2;
  int max_iters = 500;
  int project_every = 10;
  std::optional<int> resolution_bits;            // unset: unconstrained combiner
  std::optional<double> target_sparsity;         // tunes sparsity_weight when set
  std::optional<MismatchedConstellation> mismatch;

  void validate() const;
  bool constrained() const { return resolution_bits.has_value() || mismatch.has_value(); }
};

struct DesignResult {
  CMatrix combiner;         // P x N
  CMatrix digital_filter;   // K x P
  CMatrix combiner_labels;  // ideal-grid commands; empty when unconstrained
  std::vector<double> loss_trace;
  double final_ex_mse = 0.0;
  double final_int_rej = 0.0;
  double achieved_sparsity = 0.0;
  double sparsity_weight_used = 0.0;
  int iterations = 0;
  // Filled by the robust designer only.
  std::optional<double> worst_case_mse;
  std::optional<double> nominal_mse;
};

// Excess MSE of the quantized hybrid receiver above the unquantized LMMSE
// floor, as a closed form in the analog combiner. Invariant under nonzero
// scaling of A; returns the full recoverable-energy trace when A is zero.
double ex_mse(const CMatrix& combiner, const CovarianceBundle& bundle,
              const AdcModel& adc);

// MSE-optimal digital filter for a fixed combiner.
CMatrix digital_filter(const CMatrix& combiner, const CovarianceBundle& bundle,
                       const AdcModel& adc);

// Wirtinger gradient of ex_mse (the convention where A <- A - mu * grad is a
// descent step on the real-valued objective).
CMatrix ex_mse_gradient(const CMatrix& combiner, const CovarianceBundle& bundle,
                        const AdcModel& adc);

// Max modulus of the combiner response toward the interferer directions.
double int_rej(const CMatrix& combiner, const CMatrix& steering_interf);

// Subgradient of int_rej supported on the maximizing entry; ties resolved by
// the lowest row-major index.
CMatrix int_rej_subgradient(const CMatrix& combiner, const CMatrix& steering_interf);

// ex_mse + int_rej_weight * int_rej + sparsity_weight * ||A||_{1,1}.
double loss(const CMatrix& combiner, const CovarianceBundle& bundle, const AdcModel& adc,
            const DesignParams& params);

// Entry-wise complex soft-thresholding: e^{j arg z} * max(|z| - lambda, 0).
CMatrix soft_threshold(const CMatrix& z, double lambda);

// One proximal-gradient step: gradient descent on the smooth terms followed
// by soft-thresholding with step_size * sparsity_weight.
CMatrix proximal_step(const CMatrix& combiner, const CovarianceBundle& bundle,
                      const AdcModel& adc, const DesignParams& params);

// Rescales so the largest |Re|/|Im| touches 1, then projects onto the
// governing constellation. Exposed for the robust designer.
CMatrix rescale_and_project(const CMatrix& combiner, const DesignParams& params,
                            CMatrix* labels = nullptr);

// Proximal-gradient combiner design with periodic constellation projection.
// Starts from gamma unless an initial combiner is supplied; the returned
// combiner is always projected when a constellation is configured. When
// target_sparsity is set, sparsity_weight is tuned by bisection first.
DesignResult algorithm1(const CovarianceBundle& bundle, const AdcModel& adc,
                        const DesignParams& params,
                        const std::optional<CMatrix>& initial = std::nullopt);

}  // namespace hbf
