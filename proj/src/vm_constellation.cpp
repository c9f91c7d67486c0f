#include "hbf/vm_constellation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hbf {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double axis_value(int index, double delta) { return static_cast<double>(index) * delta; }

double quantize_axis(double value, double delta, int half) {
  const double scaled = value / delta;
  long long idx;
  if (scaled >= static_cast<double>(half)) {
    idx = half;
  } else if (scaled <= static_cast<double>(-half)) {
    idx = -half;
  } else {
    idx = std::llround(scaled);
  }
  return axis_value(static_cast<int>(idx), delta);
}

}  // namespace

double IdealConstellation::spacing() const {
  return 2.0 / static_cast<double>(1 << resolution_bits);
}

int IdealConstellation::half_levels() const { return 1 << (resolution_bits - 1); }

IdealConstellation build_ideal(int resolution_bits) {
  require(resolution_bits >= 1, "constellation: resolution_bits must be >= 1");
  IdealConstellation c;
  c.resolution_bits = resolution_bits;
  const int half = c.half_levels();
  const double delta = c.spacing();
  c.points.reserve(static_cast<size_t>(2 * half + 1) * static_cast<size_t>(2 * half + 1));
  for (int g = -half; g <= half; ++g)
    for (int h = -half; h <= half; ++h)
      c.points.emplace_back(axis_value(g, delta), axis_value(h, delta));
  return c;
}

MismatchParams MismatchParams::zero(int n_chains, int n_antennas) {
  MismatchParams p;
  p.i_gain = RMatrix::Zero(n_chains, n_antennas);
  p.i_phase = p.i_gain;
  p.q_gain = p.i_gain;
  p.q_phase = p.i_gain;
  p.out_gain = p.i_gain;
  p.out_phase = p.i_gain;
  return p;
}

MismatchParams MismatchParams::broadcast(int n_chains, int n_antennas, double i_gain,
                                         double i_phase, double q_gain, double q_phase,
                                         double out_gain, double out_phase) {
  MismatchParams p;
  p.i_gain = RMatrix::Constant(n_chains, n_antennas, i_gain);
  p.i_phase = RMatrix::Constant(n_chains, n_antennas, i_phase);
  p.q_gain = RMatrix::Constant(n_chains, n_antennas, q_gain);
  p.q_phase = RMatrix::Constant(n_chains, n_antennas, q_phase);
  p.out_gain = RMatrix::Constant(n_chains, n_antennas, out_gain);
  p.out_phase = RMatrix::Constant(n_chains, n_antennas, out_phase);
  return p;
}

void MismatchParams::validate() const {
  const auto same = [&](const RMatrix& m) {
    return m.rows() == i_gain.rows() && m.cols() == i_gain.cols();
  };
  require(same(i_phase) && same(q_gain) && same(q_phase) && same(out_gain) && same(out_phase),
          "mismatch: parameter matrices must share dimensions");
  require((i_gain.array() > -1.0).all() && (q_gain.array() > -1.0).all() &&
              (out_gain.array() > -1.0).all(),
          "mismatch: gains must stay above -1");
}

std::pair<CMatrix, CMatrix> mismatch_coefficients(const MismatchParams& p) {
  p.validate();
  const int rows = p.rows();
  const int cols = p.cols();
  CMatrix ci(rows, cols);
  CMatrix cq(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      ci(r, c) = std::polar((1.0 + p.i_gain(r, c)) * (1.0 + p.out_gain(r, c)),
                            p.i_phase(r, c) + p.out_phase(r, c));
      cq(r, c) = Complex(0.0, 1.0) *
                 std::polar((1.0 + p.q_gain(r, c)) * (1.0 + p.out_gain(r, c)),
                            p.q_phase(r, c) + p.out_phase(r, c));
    }
  }
  return {std::move(ci), std::move(cq)};
}

MismatchedConstellation build_mismatched(const IdealConstellation& ideal,
                                         const MismatchParams& params) {
  auto [ci, cq] = mismatch_coefficients(params);
  for (int r = 0; r < params.rows(); ++r) {
    for (int c = 0; c < params.cols(); ++c) {
      const double cross = std::abs(std::imag(std::conj(ci(r, c)) * cq(r, c)));
      require(cross > 1e-12 * std::abs(ci(r, c)) * std::abs(cq(r, c)),
              "mismatch: I/Q axes collapse, corrupted set is degenerate");
    }
  }
  MismatchedConstellation m;
  m.resolution_bits = ideal.resolution_bits;
  m.coeff_i = std::move(ci);
  m.coeff_q = std::move(cq);
  return m;
}

std::vector<Complex> MismatchedConstellation::points(int chain, int antenna) const {
  const int half = 1 << (resolution_bits - 1);
  const double delta = 2.0 / static_cast<double>(1 << resolution_bits);
  const Complex ci = coeff_i(chain, antenna);
  const Complex cq = coeff_q(chain, antenna);
  std::vector<Complex> pts;
  pts.reserve(static_cast<size_t>(2 * half + 1) * static_cast<size_t>(2 * half + 1));
  for (int g = -half; g <= half; ++g)
    for (int h = -half; h <= half; ++h)
      pts.push_back(ci * axis_value(g, delta) + cq * axis_value(h, delta));
  return pts;
}

CMatrix project_ideal(const CMatrix& matrix, int resolution_bits) {
  require(resolution_bits >= 1, "project_ideal: resolution_bits must be >= 1");
  const int half = 1 << (resolution_bits - 1);
  const double delta = 2.0 / static_cast<double>(1 << resolution_bits);
  return matrix.unaryExpr([&](const Complex& z) {
    return Complex(quantize_axis(z.real(), delta, half),
                   quantize_axis(z.imag(), delta, half));
  });
}

CMatrix project_mismatched(const CMatrix& matrix, const MismatchedConstellation& sets,
                           CMatrix* labels) {
  require(matrix.rows() == sets.coeff_i.rows() && matrix.cols() == sets.coeff_i.cols(),
          "project_mismatched: matrix/set dimensions differ");
  const int half = 1 << (sets.resolution_bits - 1);
  const double delta = 2.0 / static_cast<double>(1 << sets.resolution_bits);
  CMatrix out(matrix.rows(), matrix.cols());
  if (labels) labels->resize(matrix.rows(), matrix.cols());

  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      const Complex x = matrix(r, c);
      const Complex ci = sets.coeff_i(r, c);
      const Complex cq = sets.coeff_q(r, c);
      Complex best_point(0.0, 0.0);
      Complex best_label(0.0, 0.0);
      double best_dist = std::numeric_limits<double>::infinity();
      double best_mod = 0.0;
      double best_arg = 0.0;
      for (int g = -half; g <= half; ++g) {
        for (int h = -half; h <= half; ++h) {
          const Complex cand = ci * axis_value(g, delta) + cq * axis_value(h, delta);
          const double dist = std::norm(x - cand);
          const double mod = std::norm(cand);
          const double arg = std::arg(cand);
          const bool better =
              dist < best_dist ||
              (dist == best_dist && (mod < best_mod || (mod == best_mod && arg < best_arg)));
          if (better) {
            best_dist = dist;
            best_mod = mod;
            best_arg = arg;
            best_point = cand;
            best_label = Complex(axis_value(g, delta), axis_value(h, delta));
          }
        }
      }
      out(r, c) = best_point;
      if (labels) (*labels)(r, c) = best_label;
    }
  }
  return out;
}

double sparsity_fraction(const CMatrix& matrix) {
  if (matrix.size() == 0) return 0.0;
  long zeros = 0;
  for (Eigen::Index r = 0; r < matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < matrix.cols(); ++c)
      if (matrix(r, c).real() == 0.0 && matrix(r, c).imag() == 0.0) ++zeros;
  return static_cast<double>(zeros) / static_cast<double>(matrix.size());
}

}  // namespace hbf
