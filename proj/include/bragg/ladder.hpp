#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "bragg/pulses.hpp"

namespace bragg {

using Complex = std::complex<double>;

/// Amplitudes c_j on the momentum ladder p = q + j (units hbar k_eff) for
/// j in [j_min, j_max]. `time` is the absolute sequence time in 1/omega_k.
struct LadderState {
  double q = 0.0;
  int j_min = 0;
  std::vector<Complex> amplitudes;
  double time = 0.0;

  static LadderState basis(double q, int j_min, int j_max, int occupied, double time = 0.0);

  int j_max() const { return j_min + static_cast<int>(amplitudes.size()) - 1; }
  bool contains(int j) const { return j >= j_min && j <= j_max(); }
  Complex amplitude(int j) const { return contains(j) ? amplitudes[j - j_min] : Complex{}; }
  double population(int j) const { return std::norm(amplitude(j)); }
  double norm() const;
  /// Copy embedded into the larger window [lo, hi] (zero padded).
  LadderState widened(int lo, int hi) const;
};

/// Default truncation window [-(n+4), 2n+4] for Bragg order n.
std::pair<int, int> default_ladder_window(int order);

/// Tridiagonal Hermitian ladder Hamiltonian; upper[k] couples j_min+k to
/// j_min+k+1 (row j, column j+1), the lower diagonal is its conjugate.
struct TridiagonalHamiltonian {
  int j_min = 0;
  std::vector<double> diagonal;
  std::vector<Complex> upper;

  Complex element(int row, int col) const;
};

/// H at absolute time t for a pulse starting at pulse_start:
/// diagonal (q+j)^2 + g, H(j+1, j) = (g/2) exp(-i(dw t - phi)), g = Omega f.
TridiagonalHamiltonian ladder_hamiltonian(double q, const PulseParams& pulse, double t,
                                          double pulse_start, int j_min, int j_max);

struct LadderOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
};

/// Advances the state through the pulse (from state.time to state.time + tau)
/// with an adaptive Runge-Kutta-Fehlberg 7(8) integrator in the lab frame.
void integrate_ladder(LadderState& state, const PulseParams& pulse, const LadderOptions& options = {});

/// Exact free evolution: c_j *= exp(-i (q+j)^2 T).
void free_evolve(LadderState& state, double duration);

struct TruncationReport {
  double max_population_change = 0.0;
  bool passed = true;
  int j_min = 0;
  int j_max = 0;
};

/// Re-runs the pulse with the window widened by two sites per side and
/// compares the populations on the original window (threshold 1e-8).
TruncationReport truncation_check(const LadderState& state, const PulseParams& pulse,
                                  const LadderOptions& options = {});

}  // namespace bragg
