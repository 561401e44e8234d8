#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opflab/powerflow.hpp"

namespace opflab::pf {

using std::complex;

Loads nominal_loads(const grid::GridCase& c) {
  Loads l;
  l.p_mw.resize(c.bus_count());
  l.q_mvar.resize(c.bus_count());
  for (int i = 0; i < c.bus_count(); ++i) {
    l.p_mw[i] = c.buses[i].load_p_mw;
    l.q_mvar[i] = c.buses[i].load_q_mvar;
  }
  return l;
}

namespace {

struct Tree {
  std::vector<int> order;          // BFS order of bus indices (0-based), root first
  std::vector<int> parent;         // parent bus index, -1 at root
  std::vector<int> parent_branch;  // branch index to parent, -1 at root
  std::vector<double> x_path;      // sum of reactances root -> bus, p.u.
  std::vector<int> branch_parent_bus;  // per branch: the root-side endpoint
};

Tree build_tree(const grid::GridCase& c, int root) {
  const int n = c.bus_count();
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, branch)
  for (int b = 0; b < c.branch_count(); ++b) {
    const auto& br = c.branches[b];
    adj[br.from - 1].push_back({br.to - 1, b});
    adj[br.to - 1].push_back({br.from - 1, b});
  }
  Tree t;
  t.parent.assign(n, -1);
  t.parent_branch.assign(n, -1);
  t.x_path.assign(n, 0.0);
  t.branch_parent_bus.assign(c.branch_count(), -1);
  std::vector<int> seen(n, 0);
  t.order.push_back(root);
  seen[root] = 1;
  for (std::size_t q = 0; q < t.order.size(); ++q) {
    const int u = t.order[q];
    for (auto [v, b] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      t.parent[v] = u;
      t.parent_branch[v] = b;
      t.branch_parent_bus[b] = u;
      t.x_path[v] = t.x_path[u] + std::abs(c.branches[b].reactance);
      t.order.push_back(v);
    }
  }
  return t;
}

}  // namespace

PowerFlowSolution solve(const grid::GridCase& c, const Dispatch& dispatch,
                        const Loads& loads, const SolveOptions& opt) {
  const int n = c.bus_count();
  const int nb = c.branch_count();
  const int ng = c.generator_count();
  if (static_cast<int>(dispatch.size()) != ng)
    throw std::invalid_argument("dispatch size does not match generator count");
  if (static_cast<int>(loads.p_mw.size()) != n ||
      static_cast<int>(loads.q_mvar.size()) != n)
    throw std::invalid_argument("loads size does not match bus count");

  const double base = c.base_mva;
  const int root = c.slack_bus() - 1;
  const Tree tree = build_tree(c, root);

  // Slack voltage: the setpoint of the generator sitting at the slack bus.
  double v_slack = 1.0;
  int slack_gen = -1;
  for (int g = 0; g < ng; ++g)
    if (c.generators[g].bus - 1 == root) {
      slack_gen = g;
      v_slack = dispatch[g].v_set;
    }

  // Fixed scheduled complex injection per bus (p.u.), excluding the
  // reactive control variables and the slack bus.
  std::vector<complex<double>> s_fixed(n);
  for (int i = 0; i < n; ++i)
    s_fixed[i] = -complex<double>(loads.p_mw[i], loads.q_mvar[i]) / base;

  struct QControl {
    int gen = -1;
    int bus = -1;
    double q = 0.0;  // current injection, p.u.
    double q_min = 0.0, q_max = 0.0;
    double v_set = 1.0;
  };
  std::vector<QControl> ctrls;
  for (int g = 0; g < ng; ++g) {
    const auto& gen = c.generators[g];
    const int bus = gen.bus - 1;
    if (bus == root) continue;
    s_fixed[bus] += complex<double>(dispatch[g].p_mw / base, 0.0);
    QControl qc;
    qc.gen = g;
    qc.bus = bus;
    qc.q_min = gen.q_min_mvar / base;
    qc.q_max = gen.q_max_mvar / base;
    qc.q = std::clamp(0.0, qc.q_min, qc.q_max);
    qc.v_set = dispatch[g].v_set;
    ctrls.push_back(qc);
  }

  // dVm_i / dQ_j ~ reactance of the shared root path: the coupled
  // sensitivity matrix used to steer all voltage setpoints at once.
  const int nc = static_cast<int>(ctrls.size());
  std::vector<double> sens(static_cast<std::size_t>(nc) * nc, 0.0);
  {
    std::vector<std::vector<int>> paths(nc);  // branch sets root -> bus
    for (int k = 0; k < nc; ++k) {
      int u = ctrls[k].bus;
      while (u != root) {
        paths[k].push_back(tree.parent_branch[u]);
        u = tree.parent[u];
      }
      std::sort(paths[k].begin(), paths[k].end());
    }
    for (int i = 0; i < nc; ++i)
      for (int j = i; j < nc; ++j) {
        double shared = 0.0;
        std::size_t a = 0, b = 0;
        while (a < paths[i].size() && b < paths[j].size()) {
          if (paths[i][a] == paths[j][b]) {
            shared += std::abs(c.branches[paths[i][a]].reactance);
            ++a;
            ++b;
          } else if (paths[i][a] < paths[j][b]) {
            ++a;
          } else {
            ++b;
          }
        }
        sens[i * nc + j] = sens[j * nc + i] = shared;
      }
    for (int i = 0; i < nc; ++i) sens[i * nc + i] = std::max(sens[i * nc + i], 1e-9);
  }

  std::vector<complex<double>> z(nb);
  for (int b = 0; b < nb; ++b)
    z[b] = complex<double>(c.branches[b].resistance, c.branches[b].reactance);

  PowerFlowSolution sol;
  sol.v.assign(n, complex<double>(v_slack, 0.0));
  sol.branch_flow.assign(nb, {});
  sol.branch_current.assign(nb, 0.0);
  sol.gen_p_mw.assign(ng, 0.0);
  sol.gen_q_mvar.assign(ng, 0.0);

  std::vector<complex<double>> s_inj(n), inode(n), jbranch(nb), acc(n);

  auto injections = [&] {
    for (int i = 0; i < n; ++i) s_inj[i] = s_fixed[i];
    for (const auto& qc : ctrls) s_inj[qc.bus] += complex<double>(0.0, qc.q);
  };

  const double tol_v = 1e-8;
  int sweeps = 0;
  bool finite_ok = true;

  // One backward/forward pass plus mismatch evaluation.
  auto sweep_once = [&]() -> double {
    ++sweeps;
    for (int i = 0; i < n; ++i) {
      if (std::abs(sol.v[i]) < 1e-6) return std::numeric_limits<double>::infinity();
      inode[i] = std::conj(s_inj[i] / sol.v[i]);
      acc[i] = -inode[i];
    }
    for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
      const int u = *it;
      if (u == root) continue;
      jbranch[tree.parent_branch[u]] = acc[u];
      acc[tree.parent[u]] += acc[u];
    }
    sol.v[root] = complex<double>(v_slack, 0.0);
    for (int u : tree.order) {
      if (u == root) continue;
      const int b = tree.parent_branch[u];
      sol.v[u] = sol.v[tree.parent[u]] - z[b] * jbranch[b];
    }
    std::vector<complex<double>> i_net(n);
    for (int b = 0; b < nb; ++b) {
      const int i = c.branches[b].from - 1, j = c.branches[b].to - 1;
      const complex<double> flow = (sol.v[i] - sol.v[j]) / z[b];
      i_net[i] += flow;
      i_net[j] -= flow;
    }
    double mism = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == root) continue;
      mism = std::max(mism, std::abs(s_inj[i] - sol.v[i] * std::conj(i_net[i])));
    }
    return mism;
  };

  // The iteration cap applies per reactive-control round.
  auto sweep_to_mismatch = [&]() -> bool {
    for (int round_sweeps = 0; round_sweeps < opt.max_iterations; ++round_sweeps) {
      const double mism = sweep_once();
      sol.max_mismatch = mism;
      if (!std::isfinite(mism)) {
        finite_ok = false;
        return false;
      }
      if (mism < opt.tolerance) return true;
    }
    return false;
  };

  bool ok = false;
  for (int outer = 0; outer < 16 && finite_ok; ++outer) {
    injections();
    if (!sweep_to_mismatch()) break;

    // free controls: unconstrained ones plus clamped ones whose voltage
    // overshot past the setpoint (standard limit release)
    std::vector<int> free_idx;
    double pv_err = 0.0;
    for (int k = 0; k < nc; ++k) {
      auto& qc = ctrls[k];
      const double vm = std::abs(sol.v[qc.bus]);
      const bool at_min = qc.q <= qc.q_min + 1e-15;
      const bool at_max = qc.q >= qc.q_max - 1e-15;
      const bool clamped_hold = (at_min && vm > qc.v_set) || (at_max && vm < qc.v_set);
      if (!clamped_hold) {
        free_idx.push_back(k);
        pv_err = std::max(pv_err, std::abs(qc.v_set - vm));
      }
    }
    if (pv_err < tol_v) {
      ok = true;
      break;
    }

    // coupled correction on the free set: solve sens * dq = (v_set - vm)
    // with an active-set loop so that controls pushed past a limit are
    // frozen there and the remainder re-solved
    std::vector<double> dq(nc, 0.0);
    std::vector<int> cand = free_idx, fixed;
    for (int pass = 0; pass <= nc && !cand.empty(); ++pass) {
      const int nf = static_cast<int>(cand.size());
      std::vector<double> m(static_cast<std::size_t>(nf) * nf), rhs(nf);
      for (int a = 0; a < nf; ++a) {
        const auto& qc = ctrls[cand[a]];
        rhs[a] = qc.v_set - std::abs(sol.v[qc.bus]);
        for (int j : fixed) rhs[a] -= sens[cand[a] * nc + j] * dq[j];
        for (int b = 0; b < nf; ++b) m[a * nf + b] = sens[cand[a] * nc + cand[b]];
      }
      // dense partial-pivot elimination
      for (int col = 0; col < nf; ++col) {
        int piv = col;
        for (int r = col + 1; r < nf; ++r)
          if (std::abs(m[r * nf + col]) > std::abs(m[piv * nf + col])) piv = r;
        if (std::abs(m[piv * nf + col]) < 1e-14) continue;
        if (piv != col) {
          for (int cc = 0; cc < nf; ++cc)
            std::swap(m[piv * nf + cc], m[col * nf + cc]);
          std::swap(rhs[piv], rhs[col]);
        }
        for (int r = col + 1; r < nf; ++r) {
          const double f = m[r * nf + col] / m[col * nf + col];
          for (int cc = col; cc < nf; ++cc) m[r * nf + cc] -= f * m[col * nf + cc];
          rhs[r] -= f * rhs[col];
        }
      }
      for (int r = nf - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int cc = r + 1; cc < nf; ++cc) s -= m[r * nf + cc] * rhs[cc];
        rhs[r] = std::abs(m[r * nf + r]) < 1e-14 ? 0.0 : s / m[r * nf + r];
      }
      std::vector<int> keep;
      bool clamped_any = false;
      for (int a = 0; a < nf; ++a) {
        const int k = cand[a];
        const auto& qc = ctrls[k];
        const double target = qc.q + rhs[a];
        if (target > qc.q_max + 1e-15) {
          dq[k] = qc.q_max - qc.q;
          fixed.push_back(k);
          clamped_any = true;
        } else if (target < qc.q_min - 1e-15) {
          dq[k] = qc.q_min - qc.q;
          fixed.push_back(k);
          clamped_any = true;
        } else {
          dq[k] = rhs[a];
          keep.push_back(k);
        }
      }
      if (!clamped_any) break;
      cand = keep;
    }
    for (int k = 0; k < nc; ++k)
      ctrls[k].q = std::clamp(ctrls[k].q + dq[k], ctrls[k].q_min, ctrls[k].q_max);
  }

  sol.iterations = sweeps;
  sol.converged = ok;

  // branch quantities, realized generator outputs, losses
  for (int b = 0; b < nb; ++b) {
    const int i = c.branches[b].from - 1, j = c.branches[b].to - 1;
    const complex<double> flow = (sol.v[i] - sol.v[j]) / z[b];
    sol.branch_current[b] = std::abs(flow);
    const int sender = tree.branch_parent_bus[b] == i ? i : j;
    const complex<double> dir = sender == i ? flow : -flow;
    sol.branch_flow[b] = sol.v[sender] * std::conj(dir);
  }
  for (const auto& qc : ctrls) {
    sol.gen_p_mw[qc.gen] = dispatch[qc.gen].p_mw;
    sol.gen_q_mvar[qc.gen] = qc.q * base;
  }
  if (slack_gen >= 0) {
    // net slack injection = what the network draws at the root
    std::vector<complex<double>> i_net(n);
    for (int b = 0; b < nb; ++b) {
      const int i = c.branches[b].from - 1, j = c.branches[b].to - 1;
      const complex<double> flow = (sol.v[i] - sol.v[j]) / z[b];
      i_net[i] += flow;
      i_net[j] -= flow;
    }
    const complex<double> s_root = sol.v[root] * std::conj(i_net[root]);
    sol.gen_p_mw[slack_gen] = (s_root.real() + loads.p_mw[root] / base) * base;
    sol.gen_q_mvar[slack_gen] = (s_root.imag() + loads.q_mvar[root] / base) * base;
  }
  sol.loss_total = total_loss(c, sol);
  return sol;
}

double total_loss(const grid::GridCase& c, const PowerFlowSolution& sol) {
  double loss_pu = 0.0;
  for (int b = 0; b < c.branch_count(); ++b) {
    const auto& br = c.branches[b];
    const auto& vi = sol.v[br.from - 1];
    const auto& vj = sol.v[br.to - 1];
    const double mi = std::abs(vi), mj = std::abs(vj);
    const double delta = std::arg(vi) - std::arg(vj);
    loss_pu += br.conductance * (mi * mi + mj * mj - 2.0 * mi * mj * std::cos(delta));
  }
  return loss_pu * c.base_mva;
}

Residuals balance_residual(const grid::GridCase& c, const PowerFlowSolution& sol,
                           const Dispatch& dispatch, const Loads& loads) {
  (void)dispatch;  // realized outputs live in the solution
  const int n = c.bus_count();
  Residuals r;
  r.dp.assign(n, 0.0);
  r.dq.assign(n, 0.0);
  const double base = c.base_mva;
  std::vector<std::complex<double>> s_spec(n);
  for (int i = 0; i < n; ++i)
    s_spec[i] = -std::complex<double>(loads.p_mw[i], loads.q_mvar[i]) / base;
  for (int g = 0; g < c.generator_count(); ++g) {
    const int bus = c.generators[g].bus - 1;
    s_spec[bus] += std::complex<double>(sol.gen_p_mw[g], sol.gen_q_mvar[g]) / base;
  }
  std::vector<std::complex<double>> i_net(n);
  for (const auto& br : c.branches) {
    const std::complex<double> z(br.resistance, br.reactance);
    const int i = br.from - 1, j = br.to - 1;
    const std::complex<double> flow = (sol.v[i] - sol.v[j]) / z;
    i_net[i] += flow;
    i_net[j] -= flow;
  }
  for (int i = 0; i < n; ++i) {
    const std::complex<double> mis = s_spec[i] - sol.v[i] * std::conj(i_net[i]);
    r.dp[i] = mis.real();
    r.dq[i] = mis.imag();
  }
  return r;
}

double Residuals::max_abs() const {
  double m = 0.0;
  for (double v : dp) m = std::max(m, std::abs(v));
  for (double v : dq) m = std::max(m, std::abs(v));
  return m;
}

std::vector<NodeState> node_states(const grid::GridCase& c,
                                   const PowerFlowSolution& sol,
                                   const Loads& loads) {
  const int n = c.bus_count();
  std::vector<NodeState> out(n);
  const double base = c.base_mva;
  for (int i = 0; i < n; ++i) {
    out[i].p = -loads.p_mw[i] / base;
    out[i].q = -loads.q_mvar[i] / base;
    out[i].vm = std::abs(sol.v[i]);
  }
  for (int g = 0; g < c.generator_count(); ++g) {
    const int bus = c.generators[g].bus - 1;
    out[bus].p += sol.gen_p_mw[g] / base;
    out[bus].q += sol.gen_q_mvar[g] / base;
  }
  return out;
}

bool check_convergence(std::span<const NodeState> prev,
                       std::span<const NodeState> curr, double eps) {
  if (prev.size() != curr.size())
    throw std::invalid_argument("node state sets differ in size");
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const double dp = curr[i].p - prev[i].p;
    const double dq = curr[i].q - prev[i].q;
    const double dv = curr[i].vm - prev[i].vm;
    if (std::sqrt(dp * dp + dq * dq + dv * dv) > eps) return false;
  }
  return true;
}

}  // namespace opflab::pf
