#pragma once

#include <functional>
#include <vector>

namespace bragg {

struct SimplexOptions {
  int max_evaluations = 200;
  double f_tol = 1e-6;  // spread of objective values over the simplex
  double x_tol = 1e-6;  // largest vertex distance from the best vertex
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). The initial simplex is x0
/// plus x0 + step_i e_i.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& step,
                          const SimplexOptions& options = {});

}  // namespace bragg
