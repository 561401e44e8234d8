#pragma once

// Independent Newton-Raphson power-flow oracle used only by tests to
// cross-check the backward/forward sweep solver. Full polar NR with
// PV buses held by reactive injection and PV->PQ switching at limits.

#include "opflab/powerflow.hpp"

namespace opflab::testing {

struct NrSolution {
  std::vector<std::complex<double>> v;
  std::vector<double> gen_p_mw;
  std::vector<double> gen_q_mvar;
  bool converged = false;
  int iterations = 0;
};

NrSolution nr_solve(const grid::GridCase& c, const pf::Dispatch& dispatch,
                    const pf::Loads& loads, double tol = 1e-10,
                    int max_iter = 40);

}  // namespace opflab::testing
