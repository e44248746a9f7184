#include "bragg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bragg/errors.hpp"

namespace bragg {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& step,
                          const SimplexOptions& options) {
  const std::size_t dim = x0.size();
  if (dim == 0 || step.size() != dim) throw ParameterError("simplex start and step sizes differ");

  std::vector<std::vector<double>> vertex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) vertex[i + 1][i] += step[i];
  std::vector<double> value(dim + 1);
  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i <= dim; ++i) value[i] = eval(vertex[i]);

  std::vector<std::size_t> order(dim + 1);
  bool converged = false;
  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value[a] < value[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d = std::max(d, std::abs(vertex[i][k] - vertex[best][k]));
      size = std::max(size, d);
    }
    if (std::abs(value[worst] - value[best]) <= options.f_tol && size <= options.x_tol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < dim; ++k) centroid[k] += vertex[i][k] / dim;
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t k = 0; k < dim; ++k) x[k] = centroid[k] + t * (vertex[worst][k] - centroid[k]);
      return x;
    };

    auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < value[best]) {
      auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        vertex[worst] = std::move(expanded);
        value[worst] = fe;
      } else {
        vertex[worst] = std::move(reflected);
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second]) {
      vertex[worst] = std::move(reflected);
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : value[worst])) {
      vertex[worst] = std::move(contracted);
      value[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < dim; ++k)
        vertex[i][k] = vertex[best][k] + 0.5 * (vertex[i][k] - vertex[best][k]);
      value[i] = eval(vertex[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(value.begin(), value.end()) - value.begin());
  return {vertex[best], value[best], evaluations, converged};
}

}  // namespace bragg
