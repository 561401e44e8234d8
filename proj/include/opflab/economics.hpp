#pragma once

// Objective stack: thermal cost with valve-point ripple, renewable
// direct/reserve/penalty costs over mixed discrete-continuous
// availability densities, voltage-fluctuation metric and availability
// sampling.

#include <span>
#include <vector>

#include "opflab/grid.hpp"
#include "opflab/rng.hpp"

namespace opflab::econ {

// a p^2 + b p + c + |d sin(e (p_min - p))|, $/h.
double thermal_cost(const grid::Generator& gen, double p_mw);

// f*p (wind) or g*p (solar), $/h.
double renewable_direct_cost(const grid::Generator& gen, double p_mw);

// Availability model induced by the speed/irradiance distribution
// through the generator's power curve. Probability atoms at 0 and at
// rated output are handled exactly; the continuous part is integrated
// with 64-node Gauss-Legendre quadrature.
struct AvailabilityModel {
  grid::GeneratorKind kind = grid::GeneratorKind::Wind;
  grid::WindParams wind;
  grid::SolarParams solar;
  double rated_mw = 0.0;

  static AvailabilityModel from(const grid::Generator& gen);

  double atom_zero() const;   // P(availability = 0)
  double atom_rated() const;  // P(availability = rated)
  // Density of the continuous part at p in (0, rated).
  double density(double p_mw) const;
  double mean() const;  // expected availability, MW
  // Map an underlying standard-normal draw to an availability sample
  // (Gaussian copula; marginal matches the model exactly).
  double from_standard_normal(double z) const;
};

// h_r * E[(p_scheduled - P_avail)+], $/h.
double reserve_cost(const grid::Generator& gen, const AvailabilityModel& model,
                    double p_scheduled_mw);
// h_p * E[(P_avail - p_scheduled)+], $/h.
double penalty_cost(const grid::Generator& gen, const AvailabilityModel& model,
                    double p_scheduled_mw);

// Draw one availability sample (MW).
double sample_availability(const AvailabilityModel& model, Rng& rng);

struct CostBreakdown {
  std::vector<double> thermal;       // per thermal generator
  std::vector<double> wind_direct, wind_reserve, wind_penalty;
  std::vector<double> solar_direct, solar_reserve, solar_penalty;
  double total = 0.0;  // $/h
};

// Componentwise cost of a full schedule. `p_scheduled_mw` follows the
// case's generator order.
CostBreakdown total_cost(const grid::GridCase& c,
                         std::span<const double> p_scheduled_mw,
                         std::span<const AvailabilityModel> models);

// Ring buffer of per-bus |V| over the trailing window.
class VoltageHistory {
 public:
  VoltageHistory(int bus_count, int window);
  void push(std::span<const double> vm);
  bool full() const { return count_ >= window_; }
  int window() const { return window_; }
  // Mean of the stored window for one bus.
  double mean(int bus) const;

 private:
  int n_;
  int window_;
  int count_ = 0;
  int head_ = 0;  // slot that the next push overwrites
  std::vector<double> data_;  // window_ * n_
};

// F = sum_j | V_j(now) - mean of trailing window |. Throws unless the
// history window is full.
double voltage_fluctuation(const VoltageHistory& history,
                           std::span<const double> current_vm);

// 64-node Gauss-Legendre nodes/weights on [lo, hi].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int points, double lo, double hi);

}  // namespace opflab::econ
