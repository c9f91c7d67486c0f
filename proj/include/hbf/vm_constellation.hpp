#pragma once

#include <vector>

#include "hbf/common.hpp"

namespace hbf {

// Complex gain states realizable by an r-bit Cartesian vector modulator:
// a square grid {g + jh : g, h in {0, +-2/2^r, ..., +-1}} with 0 included
// so a VM can be switched off entirely.
struct IdealConstellation {
  int resolution_bits = 4;
  std::vector<Complex> points;  // (2^r + 1)^2 states

  double spacing() const;    // 2 / 2^r
  int half_levels() const;   // 2^(r-1), highest axis index
};

IdealConstellation build_ideal(int resolution_bits);

// Per-VM gain/phase mismatches: (i_gain, i_phase) act on the I path,
// (q_gain, q_phase) on the Q path, (out_gain, out_phase) on the combined
// output. All matrices are P x N.
struct MismatchParams {
  RMatrix i_gain, i_phase, q_gain, q_phase, out_gain, out_phase;

  static MismatchParams zero(int n_chains, int n_antennas);
  static MismatchParams broadcast(int n_chains, int n_antennas, double i_gain,
                                  double i_phase, double q_gain, double q_phase,
                                  double out_gain, double out_phase);
  void validate() const;
  int rows() const { return static_cast<int>(i_gain.rows()); }
  int cols() const { return static_cast<int>(i_gain.cols()); }
};

// Mismatch-corrupted gain states per VM. The corrupted state for an ideal
// point a is coeff_i * Re{a} + coeff_q * Im{a}, which keeps the grid
// structure but skews, scales, and rotates it per entry.
struct MismatchedConstellation {
  int resolution_bits = 4;
  CMatrix coeff_i;  // P x N
  CMatrix coeff_q;  // P x N

  std::vector<Complex> points(int chain, int antenna) const;
  int rows() const { return static_cast<int>(coeff_i.rows()); }
  int cols() const { return static_cast<int>(coeff_i.cols()); }
};

// The I/Q transform coefficients of Eq-style mismatch application:
// coeff_i = (1+i_gain)(1+out_gain) e^{j(i_phase+out_phase)},
// coeff_q = (1+q_gain)(1+out_gain) j e^{j(q_phase+out_phase)}.
std::pair<CMatrix, CMatrix> mismatch_coefficients(const MismatchParams& params);

MismatchedConstellation build_mismatched(const IdealConstellation& ideal,
                                         const MismatchParams& params);

// Separable per-axis projection onto the ideal grid: quantize Re and Im
// independently with the (2^r + 1)-level mid-tread quantizer on [-1, 1].
CMatrix project_ideal(const CMatrix& matrix, int resolution_bits);

// Entry-wise nearest corrupted point. Ties broken by smaller modulus, then
// smaller phase. When `labels` is non-null it receives the ideal grid point
// selected for each entry (the digital command behind the analog state).
CMatrix project_mismatched(const CMatrix& matrix, const MismatchedConstellation& sets,
                           CMatrix* labels = nullptr);

// Fraction of exactly-zero entries.
double sparsity_fraction(const CMatrix& matrix);

}  // namespace hbf
