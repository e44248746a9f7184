#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bragg/fft.hpp"
#include "bragg/ladder.hpp"
#include "bragg/pulses.hpp"

namespace bragg {

/// Periodic real-space grid over an integer number of lattice periods
/// (length periods * 2 pi in units of 1/k_eff). Wavefunctions are stored as
/// exp(i q x) phi(x) with phi periodic; momenta are q + m / periods.
class Grid {
 public:
  Grid(int num_points, int periods, double quasimomentum = 0.0);

  int size() const { return num_points_; }
  int periods() const { return periods_; }
  double quasimomentum() const { return q_; }
  double length() const;
  double dx() const { return length() / num_points_; }
  double momentum_spacing() const { return 1.0 / periods_; }
  double nyquist_momentum() const { return 0.5 * num_points_ / periods_; }

  double position(int i) const { return i * dx(); }
  /// Wavenumber of FFT bin m (FFTW ordering), without the q offset.
  double wavenumber(int m) const;
  double momentum(int m) const { return q_ + wavenumber(m); }
  /// FFT bin holding ladder site j (momentum q + j).
  int comb_bin(int j) const;

  /// Throws unless the Nyquist momentum exceeds (max_order + 4) hbar k_eff.
  void require_nyquist(int max_order) const;

 private:
  int num_points_;
  int periods_;
  double q_;
};

/// Wavefunction on a Grid in the position representation. Normalized so
/// that sum |psi_i|^2 / N = 1 (equal to the sum of |momentum amplitude|^2).
class GridState {
 public:
  explicit GridState(Grid grid, double time = 0.0);

  static GridState from_ladder(const LadderState& ladder, int num_points, int periods);
  /// Coherent Gaussian wavepacket, |phi(p)|^2 with standard deviation
  /// `spread` around `center` (units hbar k_eff), sampled on the momentum comb.
  static GridState gaussian_packet(Grid grid, double center, double spread);

  const Grid& grid() const { return grid_; }
  std::vector<Complex>& values() { return psi_; }
  const std::vector<Complex>& values() const { return psi_; }
  double time = 0.0;

  double norm() const;
  /// Momentum amplitudes c_m (FFT ordering) with sum |c_m|^2 = norm().
  std::vector<Complex> momentum_amplitudes() const;
  LadderState to_ladder(int j_min, int j_max) const;
  /// Population on bins that are not q + integer.
  double off_comb_population() const;

 private:
  Grid grid_;
  std::vector<Complex> psi_;
};

/// Operator-splitting composition exp(a1 h A) exp(b1 h B) ... applied
/// left to right, A = kinetic (advances time), B = potential.
struct SplittingScheme {
  std::string name;
  std::vector<double> a;
  std::vector<double> b;
  /// Order of the propagated solution.
  int order = 2;
  /// Order of the member whose deviation is used as error estimate.
  int embedded_order = 2;
  /// true: propagate the average of the scheme and its adjoint (the same
  /// coefficient list reversed) and estimate the error from their difference.
  /// false: error from step doubling.
  bool palindromic_pair = false;

  static SplittingScheme strang();
  static SplittingScheme pp34a();
  static SplittingScheme from_name(const std::string& name);

  bool is_palindromic() const;
  void validate() const;
};

struct GridOptions {
  int num_points = 512;
  int periods = 8;
  double tol = 1e-8;
  SplittingScheme scheme = SplittingScheme::pp34a();
  double initial_step_fraction = 1.0 / 200.0;
  double safety = 0.9;
  double max_growth = 5.0;
};

struct StepStatistics {
  int accepted = 0;
  int rejected = 0;
  double min_step = 0.0;
  double max_step = 0.0;
};

/// Split-step Fourier propagator. Owns its FFT plans and workspaces; use
/// one instance per worker thread.
class GridPropagator {
 public:
  explicit GridPropagator(GridOptions options = {});

  const GridOptions& options() const { return options_; }

  /// psi <- exp(-i (q+k)^2 dt) psi in momentum space. Time is not advanced.
  void kinetic_phase(GridState& state, double dt) const;
  /// psi <- exp(-i V(x, t) dt) psi with V = g(t)(1 + cos(x - dw t + phi)).
  void potential_phase(GridState& state, const PulseParams& pulse, double pulse_start, double t,
                       double dt) const;

  /// Adaptive propagation over the whole pulse starting at state.time.
  StepStatistics propagate_pulse(GridState& state, const PulseParams& pulse) const;
  /// Fixed-step propagation from t_from to t_to (either direction) for a
  /// pulse that starts at pulse_start.
  void propagate_fixed(GridState& state, const PulseParams& pulse, double pulse_start,
                       double t_from, double t_to, int steps) const;
  void free_evolve(GridState& state, double duration) const;

 private:
  enum class Op { kinetic, potential };
  struct Stage {
    Op op;
    double weight;
  };

  /// One method step; returns the error estimate (0 if not requested).
  double step(GridState& state, const PulseParams& pulse, double pulse_start, double t, double h,
              bool estimate) const;
  void apply_stages(GridState& state, const std::vector<Stage>& stages, const PulseParams& pulse,
                    double pulse_start, double t, double h) const;
  const Fft& fft(int size) const;
  static double distance(const std::vector<Complex>& x, const std::vector<Complex>& y);

  GridOptions options_;
  std::vector<Stage> forward_stages_;
  std::vector<Stage> adjoint_stages_;
  mutable std::map<int, std::unique_ptr<Fft>> ffts_;
};

}  // namespace bragg
