#include "hbf/quantization.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace hbf {

void AdcModel::validate() const {
  if (levels < 2) throw std::invalid_argument("adc: levels must be >= 2");
  if (loading_factor <= 0.0)
    throw std::invalid_argument("adc: loading_factor must be positive");
}

double kappa(const AdcModel& adc) {
  adc.validate();
  const double eta2 = adc.loading_factor * adc.loading_factor;
  const double b = static_cast<double>(adc.levels);
  const double ratio = eta2 / (3.0 * b * b);
  if (ratio >= 1.0)
    throw std::domain_error("kappa: eta^2/(3 b^2) >= 1, overload model invalid");
  return eta2 / (1.0 - ratio);
}

int total_bits(int n_chains, int levels) {
  if (levels < 2) throw std::invalid_argument("total_bits: levels must be >= 2");
  const int bits_per_adc = std::bit_width(static_cast<unsigned>(levels - 1));
  return 2 * n_chains * bits_per_adc;
}

double dynamic_range(const AdcModel& adc, double avg_component_power) {
  if (avg_component_power <= 0.0)
    throw std::invalid_argument("dynamic_range: power must be positive");
  return adc.loading_factor * std::sqrt(avg_component_power);
}

double midtread_quantize(double value, int levels, double dynamic_range) {
  if (levels < 2) throw std::invalid_argument("midtread_quantize: levels must be >= 2");
  const double delta = 2.0 * dynamic_range / static_cast<double>(levels);
  const long long top = (levels - 1) / 2;
  const double scaled = value / delta;
  long long idx;
  if (scaled >= static_cast<double>(top)) {
    idx = top;
  } else if (scaled <= static_cast<double>(-top)) {
    idx = -top;
  } else {
    idx = std::llround(scaled);  // llround: halfway cases away from zero
  }
  return static_cast<double>(idx) * delta;
}

CVector adc_convert(const CVector& z, const AdcModel& adc, double dynamic_range,
                    std::mt19937_64& rng) {
  adc.validate();
  const double delta = 2.0 * dynamic_range / static_cast<double>(adc.levels);
  std::uniform_real_distribution<double> dither(-0.5 * delta, 0.5 * delta);
  CVector out(z.size());
  for (Eigen::Index p = 0; p < z.size(); ++p) {
    double re = z(p).real();
    double im = z(p).imag();
    if (adc.dithered) {
      re += dither(rng);
      im += dither(rng);
    }
    out(p) = Complex(midtread_quantize(re, adc.levels, dynamic_range),
                     midtread_quantize(im, adc.levels, dynamic_range));
  }
  return out;
}

CVector adc_convert(const CVector& z, const AdcModel& adc, double dynamic_range,
                    uint64_t seed) {
  auto rng = make_rng(seed);
  return adc_convert(z, adc, dynamic_range, rng);
}

}  // namespace hbf
