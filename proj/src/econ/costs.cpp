#include <cmath>
#include <stdexcept>

#include "opflab/economics.hpp"

namespace opflab::econ {

double thermal_cost(const grid::Generator& gen, double p_mw) {
  if (gen.kind != grid::GeneratorKind::Thermal)
    throw std::invalid_argument("thermal_cost needs a thermal generator");
  const auto& t = gen.thermal;
  return t.a * p_mw * p_mw + t.b * p_mw + t.c +
         std::abs(t.d * std::sin(t.e * (gen.p_min_mw - p_mw)));
}

double renewable_direct_cost(const grid::Generator& gen, double p_mw) {
  switch (gen.kind) {
    case grid::GeneratorKind::Wind: return gen.wind.direct_coeff * p_mw;
    case grid::GeneratorKind::Solar: return gen.solar.direct_coeff * p_mw;
    default:
      throw std::invalid_argument("direct cost needs a wind or solar generator");
  }
}

namespace {

double coeff_reserve(const grid::Generator& gen) {
  return gen.kind == grid::GeneratorKind::Wind ? gen.wind.reserve_coeff
                                               : gen.solar.reserve_coeff;
}

double coeff_penalty(const grid::Generator& gen) {
  return gen.kind == grid::GeneratorKind::Wind ? gen.wind.penalty_coeff
                                               : gen.solar.penalty_coeff;
}

void ensure_renewable(const grid::Generator& gen, const char* what) {
  if (gen.kind == grid::GeneratorKind::Thermal)
    throw std::invalid_argument(std::string(what) + " needs a wind or solar generator");
}

double check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string(what) + " is not finite");
  return v;
}

}  // namespace

double reserve_cost(const grid::Generator& gen, const AvailabilityModel& model,
                    double p_scheduled_mw) {
  ensure_renewable(gen, "reserve_cost");
  const double s = p_scheduled_mw;
  // E[(s - P)+]: atom at zero contributes s, the rated atom never does
  // (s <= rated), the continuous part is integrated up to s.
  double e = s * model.atom_zero();
  if (s > 0.0) {
    const auto q = gauss_legendre(64, 0.0, std::min(s, model.rated_mw));
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      e += q.weights[i] * (s - q.nodes[i]) * model.density(q.nodes[i]);
  }
  return check_finite(coeff_reserve(gen) * e, "reserve cost");
}

double penalty_cost(const grid::Generator& gen, const AvailabilityModel& model,
                    double p_scheduled_mw) {
  ensure_renewable(gen, "penalty_cost");
  const double s = p_scheduled_mw;
  double e = (model.rated_mw - s) * model.atom_rated();
  if (s < model.rated_mw) {
    const auto q = gauss_legendre(64, std::max(s, 0.0), model.rated_mw);
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
      e += q.weights[i] * (q.nodes[i] - s) * model.density(q.nodes[i]);
  }
  return check_finite(coeff_penalty(gen) * e, "penalty cost");
}

CostBreakdown total_cost(const grid::GridCase& c,
                         std::span<const double> p_scheduled_mw,
                         std::span<const AvailabilityModel> models) {
  if (p_scheduled_mw.size() != static_cast<std::size_t>(c.generator_count()) ||
      models.size() != static_cast<std::size_t>(c.generator_count()))
    throw std::invalid_argument("schedule does not cover all generators");
  CostBreakdown out;
  for (int g = 0; g < c.generator_count(); ++g) {
    const auto& gen = c.generators[g];
    const double p = p_scheduled_mw[g];
    switch (gen.kind) {
      case grid::GeneratorKind::Thermal:
        out.thermal.push_back(thermal_cost(gen, p));
        break;
      case grid::GeneratorKind::Wind:
        out.wind_direct.push_back(renewable_direct_cost(gen, p));
        out.wind_reserve.push_back(reserve_cost(gen, models[g], p));
        out.wind_penalty.push_back(penalty_cost(gen, models[g], p));
        break;
      case grid::GeneratorKind::Solar:
        out.solar_direct.push_back(renewable_direct_cost(gen, p));
        out.solar_reserve.push_back(reserve_cost(gen, models[g], p));
        out.solar_penalty.push_back(penalty_cost(gen, models[g], p));
        break;
    }
  }
  double t = 0.0;
  for (const auto* v : {&out.thermal, &out.wind_direct, &out.wind_reserve,
                        &out.wind_penalty, &out.solar_direct, &out.solar_reserve,
                        &out.solar_penalty})
    for (double x : *v) t += x;
  out.total = t;
  return out;
}

VoltageHistory::VoltageHistory(int bus_count, int window)
    : n_(bus_count), window_(window) {
  if (bus_count <= 0 || window <= 0)
    throw std::invalid_argument("voltage history needs positive sizes");
  data_.assign(static_cast<std::size_t>(window_) * n_, 0.0);
}

void VoltageHistory::push(std::span<const double> vm) {
  if (vm.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("voltage vector size mismatch");
  for (int i = 0; i < n_; ++i) data_[static_cast<std::size_t>(head_) * n_ + i] = vm[i];
  head_ = (head_ + 1) % window_;
  if (count_ < window_) ++count_;
}

double VoltageHistory::mean(int bus) const {
  double s = 0.0;
  for (int w = 0; w < window_; ++w) s += data_[static_cast<std::size_t>(w) * n_ + bus];
  return s / window_;
}

double voltage_fluctuation(const VoltageHistory& history,
                           std::span<const double> current_vm) {
  if (!history.full())
    throw std::invalid_argument("voltage history window is not full");
  double f = 0.0;
  for (std::size_t j = 0; j < current_vm.size(); ++j)
    f += std::abs(current_vm[j] - history.mean(static_cast<int>(j)));
  return f;
}

}  // namespace opflab::econ
