#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hbf {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Derives an independent stream seed from a base seed (splitmix64 mix).
// Chunked Monte Carlo uses one derived seed per chunk so results do not
// depend on the number of worker threads.
uint64_t derive_seed(uint64_t base, uint64_t stream);

std::mt19937_64 make_rng(uint64_t seed);

// Fills `out` (dim x trials) with i.i.d. circularly symmetric complex
// Gaussians; row i carries total variance `variances[i]`, split evenly
// between the real and imaginary parts. Draw order is column-major.
void fill_complex_gaussian(Eigen::Ref<CMatrix> out, const RVector& variances,
                           std::mt19937_64& rng);

}  // namespace hbf
