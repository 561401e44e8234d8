#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "opflab/powerflow.hpp"
#include "support/nr_oracle.hpp"

using namespace opflab;

namespace {

grid::GridCase from_string(const std::string& text) {
  std::istringstream is(text);
  return grid::parse_case(is, "<test>");
}

// 2-bus feeder with a purely resistive branch; bus 2 carries 10 MW
// (0.1 p.u.), which has the closed-form solution
//   V2^2 - V2 + r*P = 0  =>  V2 = (1 + sqrt(1 - 4*0.1*0.1)) / 2.
grid::GridCase resistive_two_bus() {
  return from_string(R"(version 1
[base]
name res2
mva 100
kv 12.66
z_unit pu
[buses]
1 slack 0 0 0.95 1.05
2 load 10.0 0 0.5 1.5
[branches]
1 2 0.1 0.0001 50 1
[generators]
thermal 1 0.1 50 -30 30 0.05 30 10 0 0
)");
}

pf::Dispatch mid_dispatch(const grid::GridCase& c, double vset = 1.0) {
  pf::Dispatch d;
  for (const auto& g : c.generators)
    d.push_back({0.5 * (g.p_min_mw + g.p_max_mw), vset});
  return d;
}

void check_against_oracle(const grid::GridCase& c, const pf::Dispatch& d,
                          const pf::Loads& loads, double tol_v = 1e-5) {
  const auto sweep = pf::solve(c, d, loads);
  REQUIRE(sweep.converged);
  const auto nr = testing::nr_solve(c, d, loads);
  REQUIRE(nr.converged);
  for (int i = 0; i < c.bus_count(); ++i) {
    CHECK(std::abs(std::abs(sweep.v[i]) - std::abs(nr.v[i])) < tol_v);
    CHECK(std::abs(std::arg(sweep.v[i]) - std::arg(nr.v[i])) < tol_v);
  }
}

}  // namespace

TEST_CASE("zero-load network solves flat in one iteration") {
  const auto c = from_string(R"(version 1
[base]
z_unit pu
[buses]
1 slack 0 0 0.95 1.05
2 load 0 0 0.95 1.05
[branches]
1 2 0.05 0.1 5 0.05
[generators]
thermal 1 0.1 2 -1 1 0.05 30 10 1.5 2
)");
  const auto sol = pf::solve(c, mid_dispatch(c), pf::nominal_loads(c));
  REQUIRE(sol.converged);
  CHECK(sol.iterations == 1);
  for (const auto& v : sol.v) CHECK(std::abs(v) == doctest::Approx(1.0));
  CHECK(sol.loss_total == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("resistive 2-bus case matches the closed-form quadratic") {
  const auto c = resistive_two_bus();
  const auto sol = pf::solve(c, {{0.0, 1.0}}, pf::nominal_loads(c));
  REQUIRE(sol.converged);
  const double v2_expected = 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * 0.1 * 0.1));
  CHECK(std::abs(sol.v[1]) == doctest::Approx(v2_expected).epsilon(2e-5));
  const double i_pu = 0.1 / v2_expected;
  const double loss_mw = i_pu * i_pu * 0.1 * 100.0;
  CHECK(sol.loss_total == doctest::Approx(loss_mw).epsilon(1e-3));
}

TEST_CASE("sweep voltages match the Newton-Raphson oracle") {
  SUBCASE("toy2 with wind at half rating") {
    const auto c = grid::load_case("cases/toy2.case");
    check_against_oracle(c, {{1.0, 1.0}, {0.5, 1.0}}, pf::nominal_loads(c));
  }
  SUBCASE("toy6 with mixed voltage setpoints") {
    const auto c = grid::load_case("cases/toy6.case");
    pf::Dispatch d = {{0.8, 1.0}, {0.4, 1.02}, {0.6, 1.01}, {0.3, 0.99}};
    check_against_oracle(c, d, pf::nominal_loads(c));
  }
  SUBCASE("33-bus at nominal load, mid dispatch") {
    const auto c = grid::load_case("cases/ieee33.case");
    check_against_oracle(c, mid_dispatch(c), pf::nominal_loads(c));
  }
  SUBCASE("33-bus with a reactive limit binding") {
    const auto c = grid::load_case("cases/ieee33.case");
    auto d = mid_dispatch(c);
    d[5].v_set = 1.05;  // deep-feeder wind bus forced to its ceiling
    check_against_oracle(c, d, pf::nominal_loads(c));
  }
  SUBCASE("33-bus under scaled loads") {
    const auto c = grid::load_case("cases/ieee33.case");
    auto loads = pf::nominal_loads(c);
    for (auto& p : loads.p_mw) p *= 1.2;
    for (auto& q : loads.q_mvar) q *= 1.2;
    check_against_oracle(c, mid_dispatch(c), loads);
  }
}

TEST_CASE("loss agrees with an independent reference solver within 0.5%") {
  const auto c = grid::load_case("cases/ieee33.case");
  const auto d = mid_dispatch(c);
  const auto loads = pf::nominal_loads(c);
  const auto sweep = pf::solve(c, d, loads);
  REQUIRE(sweep.converged);
  const auto nr = testing::nr_solve(c, d, loads);
  REQUIRE(nr.converged);
  pf::PowerFlowSolution nr_as_sol;
  nr_as_sol.v = nr.v;
  const double nr_loss = pf::total_loss(c, nr_as_sol);
  CHECK(sweep.loss_total == doctest::Approx(nr_loss).epsilon(0.005));
}

TEST_CASE("balance residual is tiny when converged and grows when perturbed") {
  const auto c = grid::load_case("cases/toy6.case");
  const auto d = mid_dispatch(c);
  const auto loads = pf::nominal_loads(c);
  auto sol = pf::solve(c, d, loads);
  REQUIRE(sol.converged);
  const auto r0 = pf::balance_residual(c, sol, d, loads);
  CHECK(r0.max_abs() < 1e-6);

  auto perturbed = sol;
  perturbed.v[3] += 0.01;
  const auto r1 = pf::balance_residual(c, perturbed, d, loads);
  CHECK(r1.max_abs() > r0.max_abs() * 10);
}

TEST_CASE("zero-load zero-injection residuals are identically zero") {
  const auto c = from_string(R"(version 1
[base]
z_unit pu
[buses]
1 slack 0 0 0.95 1.05
2 load 0 0 0.95 1.05
[branches]
1 2 0.05 0.1 5 0.05
[generators]
thermal 1 0 2 -1 1 0 0 0 0 0
)");
  const auto sol = pf::solve(c, {{0.0, 1.0}}, pf::nominal_loads(c));
  const auto r = pf::balance_residual(c, sol, {{0.0, 1.0}}, pf::nominal_loads(c));
  CHECK(r.max_abs() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("total_loss direct substitutions") {
  SUBCASE("identical endpoint voltages give zero loss") {
    const auto c = resistive_two_bus();
    pf::PowerFlowSolution s;
    s.v = {{1.0, 0.0}, {1.0, 0.0}};
    CHECK(pf::total_loss(c, s) == doctest::Approx(0.0));
  }
  SUBCASE("unit conductance, V = (1.0, 0.9), zero angle") {
    const auto c = from_string(R"(version 1
[base]
z_unit pu
[buses]
1 slack 0 0 0.95 1.05
2 load 0 0 0.5 1.5
[branches]
1 2 1.0 0.0001 5 1
[generators]
thermal 1 0 2 -1 1 0 0 0 0 0
)");
    // G = r/(r^2+x^2) with x ~ 0 gives G ~ 1/r = 1
    pf::PowerFlowSolution s;
    s.v = {{1.0, 0.0}, {0.9, 0.0}};
    const double g = c.branches[0].conductance;
    const double expected_pu = g * (1.0 + 0.81 - 1.8);
    CHECK(pf::total_loss(c, s) == doctest::Approx(expected_pu * 100.0).epsilon(1e-12));
    CHECK(expected_pu == doctest::Approx(0.01).epsilon(1e-4));
  }
}

TEST_CASE("conductance-form loss equals sum of I^2 R on the solved 33-bus case") {
  const auto c = grid::load_case("cases/ieee33.case");
  const auto sol = pf::solve(c, mid_dispatch(c), pf::nominal_loads(c));
  REQUIRE(sol.converged);
  double i2r_pu = 0.0;
  for (int b = 0; b < c.branch_count(); ++b)
    i2r_pu += sol.branch_current[b] * sol.branch_current[b] * c.branches[b].resistance;
  CHECK(sol.loss_total / c.base_mva == doctest::Approx(i2r_pu).epsilon(1e-8));
}

TEST_CASE("generation balances load plus loss") {
  for (const char* name :
       {"cases/toy2.case", "cases/toy6.case", "cases/ieee33.case"}) {
    const auto c = grid::load_case(name);
    const auto loads = pf::nominal_loads(c);
    const auto sol = pf::solve(c, mid_dispatch(c), loads);
    REQUIRE(sol.converged);
    double gen = 0.0;
    for (double p : sol.gen_p_mw) gen += p;
    const double load = c.total_load_p_mw();
    CHECK(std::abs(gen - load - sol.loss_total) / c.base_mva < 1e-6);
  }
}

TEST_CASE("loss grows strictly with load on the 2-bus case") {
  const auto base_case = resistive_two_bus();
  double prev = -1.0;
  for (double mw = 2.0; mw <= 14.0; mw += 2.0) {
    pf::Loads loads{{0.0, mw}, {0.0, 0.0}};
    const auto sol = pf::solve(base_case, {{0.0, 1.0}}, loads);
    REQUIRE(sol.converged);
    CHECK(sol.loss_total > prev);
    prev = sol.loss_total;
  }
}

TEST_CASE("non-convergence is flagged, not thrown") {
  const auto c = resistive_two_bus();
  pf::Loads absurd{{0.0, 5000.0}, {0.0, 0.0}};
  const auto sol = pf::solve(c, {{0.0, 1.0}}, absurd);
  CHECK_FALSE(sol.converged);
}

TEST_CASE("node-state convergence gate") {
  using pf::NodeState;
  const std::vector<NodeState> a = {{0.1, 0.0, 1.0}, {0.2, 0.1, 0.99}};
  SUBCASE("identical states pass for any positive epsilon") {
    CHECK(pf::check_convergence(a, a, 1e-12));
  }
  SUBCASE("a single node moving 2*eps in P fails") {
    auto b = a;
    b[1].p += 2e-3;
    CHECK_FALSE(pf::check_convergence(a, b, 1e-3));
  }
  SUBCASE("all nodes moving eps/2 in one coordinate pass") {
    auto b = a;
    for (auto& s : b) s.q += 0.5e-3;
    CHECK(pf::check_convergence(a, b, 1e-3));
  }
  SUBCASE("size mismatch throws") {
    std::vector<NodeState> c = {{0, 0, 1}};
    CHECK_THROWS_AS(pf::check_convergence(a, c, 1e-3), std::invalid_argument);
  }
}
