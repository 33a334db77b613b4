#include "dampsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace dampsim {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const Eigen::VectorXd& start, const SimplexOptions& options) {
  const Eigen::Index n = start.size();
  std::vector<Eigen::VectorXd> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double step = start[k] != 0.0 ? options.initial_step * std::max(1.0, std::abs(start[k]))
                                         : options.initial_step;
    pts[k + 1][k] += step;
  }
  for (std::size_t k = 0; k < pts.size(); ++k) vals[k] = objective(pts[k]);

  std::vector<std::size_t> order(n + 1);
  SimplexResult result;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    double diameter = 0.0;
    for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).lpNorm<Eigen::Infinity>());
    if (vals[worst] - vals[best] <= options.f_tolerance && diameter <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (k != worst) centroid += pts[k];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
    const double f_reflected = objective(reflected);
    if (f_reflected < vals[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        pts[worst] = expanded;
        vals[worst] = f_expanded;
      } else {
        pts[worst] = reflected;
        vals[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < vals[second_worst]) {
      pts[worst] = reflected;
      vals[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < vals[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double f_contracted = objective(contracted);
    if (f_contracted < (outside ? f_reflected : vals[worst])) {
      pts[worst] = contracted;
      vals[worst] = f_contracted;
      continue;
    }
    // shrink towards the best vertex
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == best) continue;
      pts[k] = pts[best] + 0.5 * (pts[k] - pts[best]);
      vals[k] = objective(pts[k]);
    }
  }

  const auto best_it = std::min_element(vals.begin(), vals.end());
  const auto best_idx = static_cast<std::size_t>(best_it - vals.begin());
  result.x = pts[best_idx];
  result.value = *best_it;
  result.iterations = it;
  return result;
}

}  // namespace dampsim
