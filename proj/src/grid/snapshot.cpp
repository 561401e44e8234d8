#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opflab/powerflow.hpp"

namespace opflab::grid {

GraphSnapshot snapshot(const GridCase& c, const pf::PowerFlowSolution& sol,
                       long long time_index) {
  if (!sol.converged)
    throw std::invalid_argument("snapshot requires a converged solution");
  const int n = c.bus_count();
  const int width = feature_width(c);

  GraphSnapshot s;
  s.time_index = time_index;
  s.n = n;
  s.width = width;
  s.x.assign(static_cast<std::size_t>(n) * width, 0.0);

  // Net injections implied by the solved voltages.
  std::vector<std::complex<double>> i_net(n);
  // (neighbor id, |S| at this bus's side), per bus
  std::vector<std::vector<std::pair<int, double>>> incident(n);
  for (const auto& br : c.branches) {
    const std::complex<double> z(br.resistance, br.reactance);
    const int i = br.from - 1, j = br.to - 1;
    const std::complex<double> flow = (sol.v[i] - sol.v[j]) / z;
    i_net[i] += flow;
    i_net[j] -= flow;
    const double im = std::abs(flow);
    incident[i].push_back({j, std::abs(sol.v[i]) * im});
    incident[j].push_back({i, std::abs(sol.v[j]) * im});
  }

  for (int i = 0; i < n; ++i) {
    const std::complex<double> sinj = sol.v[i] * std::conj(i_net[i]);
    double* row = s.x.data() + static_cast<std::size_t>(i) * width;
    row[0] = sinj.real();
    row[1] = sinj.imag();
    row[2] = std::abs(sol.v[i]);
    row[3] = std::arg(sol.v[i]);
    std::sort(incident[i].begin(), incident[i].end());
    for (std::size_t k = 0; k < incident[i].size(); ++k)
      row[4 + k] = incident[i][k].second;
  }
  return s;
}

}  // namespace opflab::grid
