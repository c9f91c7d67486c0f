#pragma once

#include <cstdint>
#include <random>

#include "hbf/common.hpp"

namespace hbf {

// Uniform mid-tread ADC with b levels per real component and non-subtractive
// dither. The loading factor sets the dynamic range as a multiple of the
// input standard deviation (eta = 3 keeps Gaussian overload below 1%).
struct AdcModel {
  int levels = 16;
  double loading_factor = 3.0;
  bool dithered = true;

  void validate() const;
};

// Overload-corrected quantization constant eta^2 * (1 - eta^2/(3 b^2))^{-1}.
// Throws std::domain_error when eta^2/(3 b^2) >= 1.
double kappa(const AdcModel& adc);

// Total bit budget of a P-chain receiver: 2 * P * ceil(log2(levels)).
int total_bits(int n_chains, int levels);

// Dynamic range gamma = eta * sqrt(avg_component_power), where the power is
// the per-real-component average shared by all 2P ADCs.
double dynamic_range(const AdcModel& adc, double avg_component_power);

// b-level mid-tread quantizer on [-gamma, gamma] with spacing 2*gamma/b and
// round-half-away-from-zero. Even level counts drop the extreme code so the
// output grid stays symmetric about zero.
double midtread_quantize(double value, int levels, double dynamic_range);

// Quantizes the real and imaginary parts of each entry independently (2P
// ADCs). With dithering enabled, adds i.i.d. uniform dither on
// [-delta/2, delta/2] before quantizing and does not subtract it.
CVector adc_convert(const CVector& z, const AdcModel& adc, double dynamic_range,
                    std::mt19937_64& rng);
CVector adc_convert(const CVector& z, const AdcModel& adc, double dynamic_range,
                    uint64_t seed);

}  // namespace hbf
