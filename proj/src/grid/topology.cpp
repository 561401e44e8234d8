#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opflab/grid.hpp"
#include "opflab/kernels.hpp"
#include "opflab/rng.hpp"

namespace opflab::grid {

namespace {

// Largest eigenvalue of the (symmetric PSD) Laplacian by power iteration.
double power_iteration_lambda_max(const std::vector<double>& m, int n) {
  Rng rng(0x5eedULL);
  std::vector<double> v(n), w(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  double norm = std::sqrt(kern::dot(v.data(), v.data(), n));
  for (auto& x : v) x /= norm;

  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    kern::gemm(n, 1, n, m.data(), v.data(), w.data(), false);
    lambda = kern::dot(v.data(), w.data(), n);  // Rayleigh quotient
    // symmetric-matrix bound: |lambda_hat - lambda| <= ||Mv - lambda v||
    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = w[i] - lambda * v[i];
      resid += r * r;
    }
    norm = std::sqrt(kern::dot(w.data(), w.data(), n));
    if (norm == 0.0) return 0.0;
    for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
    if (std::sqrt(resid) <= 1e-10 * std::max(1.0, std::abs(lambda))) return lambda;
  }
  return lambda;
}

}  // namespace

GraphTopology build_topology(const GridCase& c) {
  const int n = c.bus_count();
  GraphTopology g;
  g.n = n;
  g.adjacency.assign(static_cast<std::size_t>(n) * n, 0.0);
  g.neighbors.assign(n, {});
  for (const auto& br : c.branches) {
    const int i = br.from - 1, j = br.to - 1;
    g.adjacency[i * n + j] = 1.0;
    g.adjacency[j * n + i] = 1.0;
    g.neighbors[i].push_back(j);
    g.neighbors[j].push_back(i);
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());

  // reachability from bus 0
  {
    std::vector<int> seen(n, 0), stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : g.neighbors[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    for (int i = 0; i < n; ++i)
      if (!seen[i]) throw std::runtime_error("disconnected graph at bus " +
                                             std::to_string(i + 1));
  }

  g.laplacian.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) {
      deg += g.adjacency[i * n + j];
      g.laplacian[i * n + j] = -g.adjacency[i * n + j];
    }
    g.laplacian[i * n + i] = deg;
  }

  g.lambda_max = power_iteration_lambda_max(g.laplacian, n);
  g.scaled_laplacian.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double scale = 2.0 / g.lambda_max;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.scaled_laplacian[i * n + j] =
          scale * g.laplacian[i * n + j] - (i == j ? 1.0 : 0.0);
  return g;
}

int feature_width(const GridCase& c) {
  std::vector<int> degree(c.bus_count(), 0);
  for (const auto& br : c.branches) {
    ++degree[br.from - 1];
    ++degree[br.to - 1];
  }
  const int max_degree = *std::max_element(degree.begin(), degree.end());
  return 4 + max_degree;
}

}  // namespace opflab::grid
