#include "nr_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace opflab::testing {

namespace {
enum class BusType { Slack, Pv, Pq };
}

NrSolution nr_solve(const grid::GridCase& c, const pf::Dispatch& dispatch,
                    const pf::Loads& loads, double tol, int max_iter) {
  const int n = c.bus_count();
  const int ng = c.generator_count();
  const double base = c.base_mva;
  const int slack = c.slack_bus() - 1;

  Eigen::MatrixXcd ybus = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& br : c.branches) {
    const std::complex<double> y =
        1.0 / std::complex<double>(br.resistance, br.reactance);
    const int i = br.from - 1, j = br.to - 1;
    ybus(i, j) -= y;
    ybus(j, i) -= y;
    ybus(i, i) += y;
    ybus(j, j) += y;
  }

  // per-bus scheduled injections without reactive control, p.u.
  std::vector<double> p_spec(n), q_spec(n);
  for (int i = 0; i < n; ++i) {
    p_spec[i] = -loads.p_mw[i] / base;
    q_spec[i] = -loads.q_mvar[i] / base;
  }
  std::vector<int> gen_at_bus(n, -1);
  std::vector<BusType> type(n, BusType::Pq);
  double v_slack = 1.0;
  for (int g = 0; g < ng; ++g) {
    const int bus = c.generators[g].bus - 1;
    gen_at_bus[bus] = g;
    if (bus == slack) {
      v_slack = dispatch[g].v_set;
    } else {
      p_spec[bus] += dispatch[g].p_mw / base;
      type[bus] = BusType::Pv;
    }
  }
  type[slack] = BusType::Slack;

  std::vector<double> vm(n, 1.0), va(n, 0.0);
  vm[slack] = v_slack;
  for (int i = 0; i < n; ++i)
    if (type[i] == BusType::Pv) vm[i] = dispatch[gen_at_bus[i]].v_set;

  // Reactive output pinned at a limit (PV temporarily treated as PQ).
  std::vector<int> pinned(n, 0);  // 0 free, -1 at min, +1 at max
  std::vector<double> q_pin(n, 0.0);

  NrSolution out;
  out.v.assign(n, {});
  out.gen_p_mw.assign(ng, 0.0);
  out.gen_q_mvar.assign(ng, 0.0);

  auto calc_pq = [&](int i, double& p, double& q) {
    p = 0.0;
    q = 0.0;
    for (int j = 0; j < n; ++j) {
      const double g = ybus(i, j).real(), b = ybus(i, j).imag();
      const double th = va[i] - va[j];
      p += vm[i] * vm[j] * (g * std::cos(th) + b * std::sin(th));
      q += vm[i] * vm[j] * (g * std::sin(th) - b * std::cos(th));
    }
  };

  int total_iter = 0;
  for (int outer = 0; outer < 20; ++outer) {
    // index maps for the current PV/PQ split
    std::vector<int> ang_idx, mag_idx;
    for (int i = 0; i < n; ++i) {
      if (type[i] == BusType::Slack) continue;
      ang_idx.push_back(i);
      const bool is_pv = type[i] == BusType::Pv && !pinned[i];
      if (!is_pv) mag_idx.push_back(i);
    }
    const int na = static_cast<int>(ang_idx.size());
    const int nm = static_cast<int>(mag_idx.size());

    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
      ++total_iter;
      Eigen::VectorXd mismatch(na + nm);
      std::vector<double> pc(n), qc(n);
      for (int i = 0; i < n; ++i) calc_pq(i, pc[i], qc[i]);
      for (int k = 0; k < na; ++k)
        mismatch(k) = p_spec[ang_idx[k]] - pc[ang_idx[k]];
      for (int k = 0; k < nm; ++k) {
        const int i = mag_idx[k];
        const double qs = q_spec[i] + (pinned[i] ? q_pin[i] : 0.0);
        mismatch(na + k) = qs - qc[i];
      }
      if (mismatch.lpNorm<Eigen::Infinity>() < tol) {
        converged = true;
        break;
      }

      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(na + nm, na + nm);
      auto dp_dth = [&](int i, int j) {
        if (i == j) return -qc[i] - ybus(i, i).imag() * vm[i] * vm[i];
        const double g = ybus(i, j).real(), b = ybus(i, j).imag();
        const double th = va[i] - va[j];
        return vm[i] * vm[j] * (g * std::sin(th) - b * std::cos(th));
      };
      auto dp_dv = [&](int i, int j) {
        if (i == j) return pc[i] / vm[i] + ybus(i, i).real() * vm[i];
        const double g = ybus(i, j).real(), b = ybus(i, j).imag();
        const double th = va[i] - va[j];
        return vm[i] * (g * std::cos(th) + b * std::sin(th));
      };
      auto dq_dth = [&](int i, int j) {
        if (i == j) return pc[i] - ybus(i, i).real() * vm[i] * vm[i];
        const double g = ybus(i, j).real(), b = ybus(i, j).imag();
        const double th = va[i] - va[j];
        return -vm[i] * vm[j] * (g * std::cos(th) + b * std::sin(th));
      };
      auto dq_dv = [&](int i, int j) {
        if (i == j) return qc[i] / vm[i] - ybus(i, i).imag() * vm[i];
        const double g = ybus(i, j).real(), b = ybus(i, j).imag();
        const double th = va[i] - va[j];
        return vm[i] * (g * std::sin(th) - b * std::cos(th));
      };
      for (int r = 0; r < na; ++r)
        for (int cdx = 0; cdx < na; ++cdx)
          jac(r, cdx) = dp_dth(ang_idx[r], ang_idx[cdx]);
      for (int r = 0; r < na; ++r)
        for (int cdx = 0; cdx < nm; ++cdx)
          jac(r, na + cdx) = dp_dv(ang_idx[r], mag_idx[cdx]);
      for (int r = 0; r < nm; ++r)
        for (int cdx = 0; cdx < na; ++cdx)
          jac(na + r, cdx) = dq_dth(mag_idx[r], ang_idx[cdx]);
      for (int r = 0; r < nm; ++r)
        for (int cdx = 0; cdx < nm; ++cdx)
          jac(na + r, na + cdx) = dq_dv(mag_idx[r], mag_idx[cdx]);

      Eigen::VectorXd dx = jac.partialPivLu().solve(mismatch);
      if (!dx.allFinite()) return out;
      for (int k = 0; k < na; ++k) va[ang_idx[k]] += dx(k);
      for (int k = 0; k < nm; ++k) vm[mag_idx[k]] += dx(na + k);
    }
    if (!converged) return out;

    // enforce generator reactive limits, with release when the voltage
    // moves past the setpoint again
    bool changed = false;
    std::vector<double> pc(n), qc(n);
    for (int i = 0; i < n; ++i) calc_pq(i, pc[i], qc[i]);
    for (int i = 0; i < n; ++i) {
      if (type[i] != BusType::Pv) continue;
      const auto& gen = c.generators[gen_at_bus[i]];
      const double qmin = gen.q_min_mvar / base, qmax = gen.q_max_mvar / base;
      if (!pinned[i]) {
        const double qg = qc[i] - q_spec[i];  // required reactive injection
        if (qg > qmax + 1e-12) {
          pinned[i] = 1;
          q_pin[i] = qmax;
          changed = true;
        } else if (qg < qmin - 1e-12) {
          pinned[i] = -1;
          q_pin[i] = qmin;
          changed = true;
        }
      } else {
        const double vset = dispatch[gen_at_bus[i]].v_set;
        if ((pinned[i] == 1 && vm[i] > vset + 1e-9) ||
            (pinned[i] == -1 && vm[i] < vset - 1e-9)) {
          pinned[i] = 0;
          vm[i] = vset;
          changed = true;
        }
      }
    }
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) return out;

  out.iterations = total_iter;
  for (int i = 0; i < n; ++i) out.v[i] = std::polar(vm[i], va[i]);
  std::vector<double> pc(n), qc(n);
  for (int i = 0; i < n; ++i) calc_pq(i, pc[i], qc[i]);
  for (int g = 0; g < ng; ++g) {
    const int bus = c.generators[g].bus - 1;
    if (bus == slack) {
      out.gen_p_mw[g] = (pc[bus] + loads.p_mw[bus] / base) * base;
      out.gen_q_mvar[g] = (qc[bus] + loads.q_mvar[bus] / base) * base;
    } else {
      out.gen_p_mw[g] = dispatch[g].p_mw;
      out.gen_q_mvar[g] = (qc[bus] - q_spec[bus]) * base;
    }
  }
  return out;
}

}  // namespace opflab::testing
