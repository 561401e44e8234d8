#pragma once

// AC power flow on radial networks via backward/forward sweep.
// Generator buses hold their voltage setpoint through local reactive
// injection, falling back to fixed Q at a limit; the slack bus absorbs
// the active/reactive balance.

#include <complex>
#include <span>
#include <vector>

#include "opflab/grid.hpp"

namespace opflab::pf {

// Per-generator setting: active power schedule (ignored for the
// generator at the slack bus) and voltage magnitude setpoint.
struct GenSetting {
  double p_mw = 0.0;
  double v_set = 1.0;
};
using Dispatch = std::vector<GenSetting>;

struct Loads {
  std::vector<double> p_mw;    // per bus
  std::vector<double> q_mvar;  // per bus
};

Loads nominal_loads(const grid::GridCase& c);

struct SolveOptions {
  double tolerance = 1e-6;  // max per-bus complex power mismatch, p.u.
  int max_iterations = 50;
};

struct PowerFlowSolution {
  std::vector<std::complex<double>> v;            // per bus, p.u.
  std::vector<std::complex<double>> branch_flow;  // sending-end S per branch, p.u.
  std::vector<double> branch_current;             // |I| per branch, p.u.
  double loss_total = 0.0;                        // MW
  bool converged = false;
  int iterations = 0;
  // Realized generator outputs (slack picks up the balance; reactive
  // output is what the voltage-setpoint control settled on).
  std::vector<double> gen_p_mw;
  std::vector<double> gen_q_mvar;
  double max_mismatch = 0.0;  // p.u.
};

PowerFlowSolution solve(const grid::GridCase& c, const Dispatch& dispatch,
                        const Loads& loads, const SolveOptions& opt = {});

// Power-balance residuals (dP, dQ) per bus, p.u., evaluated at the
// solution voltages with the injections implied by dispatch and loads.
struct Residuals {
  std::vector<double> dp;
  std::vector<double> dq;
  double max_abs() const;
};
Residuals balance_residual(const grid::GridCase& c, const PowerFlowSolution& sol,
                           const Dispatch& dispatch, const Loads& loads);

// Total active loss in MW from the conductance form
// sum_b G_b [Vi^2 + Vj^2 - 2 Vi Vj cos(delta_ij)].
double total_loss(const grid::GridCase& c, const PowerFlowSolution& sol);

// Node state triple used by the environment's stability gate.
struct NodeState {
  double p = 0.0;  // net injection, p.u.
  double q = 0.0;
  double vm = 0.0;
};

std::vector<NodeState> node_states(const grid::GridCase& c,
                                   const PowerFlowSolution& sol,
                                   const Loads& loads);

// True iff every node moved by at most eps in Euclidean norm.
bool check_convergence(std::span<const NodeState> prev,
                       std::span<const NodeState> curr, double eps);

}  // namespace opflab::pf

namespace opflab::grid {

// Feature snapshot of a solved operating point. Row i: net injections,
// voltage magnitude/angle and the apparent-power magnitude of each
// incident branch in ascending neighbor-id order, zero-padded.
GraphSnapshot snapshot(const GridCase& c, const pf::PowerFlowSolution& sol,
                       long long time_index);

}  // namespace opflab::grid
