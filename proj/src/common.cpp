#include "hbf/common.hpp"

namespace hbf {

uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

void fill_complex_gaussian(Eigen::Ref<CMatrix> out, const RVector& variances,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  const Eigen::Index dim = out.rows();
  RVector sigma(dim);
  for (Eigen::Index i = 0; i < dim; ++i) sigma(i) = std::sqrt(0.5 * variances(i));
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      out(i, t) = Complex(sigma(i) * unit(rng), sigma(i) * unit(rng));
    }
  }
}

}  // namespace hbf
