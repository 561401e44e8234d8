#include <cmath>
#include <stdexcept>

#include "opflab/economics.hpp"

namespace opflab::econ {

namespace {

double weibull_cdf(double v, double k, double c) {
  if (v <= 0.0) return 0.0;
  return 1.0 - std::exp(-std::pow(v / c, k));
}

double weibull_pdf(double v, double k, double c) {
  if (v <= 0.0) return 0.0;
  const double r = v / c;
  return (k / c) * std::pow(r, k - 1.0) * std::exp(-std::pow(r, k));
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double lognormal_pdf(double x, double mu, double sigma) {
  if (x <= 0.0) return 0.0;
  const double d = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * d * d) / (x * sigma * std::sqrt(2.0 * M_PI));
}

}  // namespace

AvailabilityModel AvailabilityModel::from(const grid::Generator& gen) {
  if (gen.kind == grid::GeneratorKind::Thermal)
    throw std::invalid_argument("thermal generators have no availability model");
  AvailabilityModel m;
  m.kind = gen.kind;
  m.wind = gen.wind;
  m.solar = gen.solar;
  m.rated_mw = gen.p_max_mw;
  return m;
}

double AvailabilityModel::atom_zero() const {
  if (kind == grid::GeneratorKind::Wind) {
    const auto& w = wind;
    return weibull_cdf(w.v_cut_in, w.weibull_k, w.weibull_c) +
           (1.0 - weibull_cdf(w.v_cut_out, w.weibull_k, w.weibull_c));
  }
  return 0.0;  // lognormal irradiance is almost surely positive
}

double AvailabilityModel::atom_rated() const {
  if (kind == grid::GeneratorKind::Wind) {
    const auto& w = wind;
    return weibull_cdf(w.v_cut_out, w.weibull_k, w.weibull_c) -
           weibull_cdf(w.v_rated, w.weibull_k, w.weibull_c);
  }
  const auto& s = solar;
  return 1.0 - std_normal_cdf((std::log(s.g_std) - s.ln_mu) / s.ln_sigma);
}

double AvailabilityModel::density(double p_mw) const {
  if (p_mw <= 0.0 || p_mw >= rated_mw) return 0.0;
  if (kind == grid::GeneratorKind::Wind) {
    const auto& w = wind;
    const double dv_dp = (w.v_rated - w.v_cut_in) / rated_mw;
    const double v = w.v_cut_in + p_mw * dv_dp;
    return weibull_pdf(v, w.weibull_k, w.weibull_c) * dv_dp;
  }
  const auto& s = solar;
  const double dg_dp = s.g_std / rated_mw;
  const double g = p_mw * dg_dp;
  return lognormal_pdf(g, s.ln_mu, s.ln_sigma) * dg_dp;
}

double AvailabilityModel::mean() const {
  const auto q = gauss_legendre(64, 0.0, rated_mw);
  double m = rated_mw * atom_rated();
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    m += q.weights[i] * q.nodes[i] * density(q.nodes[i]);
  return m;
}

double AvailabilityModel::from_standard_normal(double z) const {
  if (kind == grid::GeneratorKind::Wind) {
    const auto& w = wind;
    double u = std_normal_cdf(z);
    u = std::min(u, 1.0 - 1e-16);
    const double v = w.weibull_c * std::pow(-std::log1p(-u), 1.0 / w.weibull_k);
    if (v < w.v_cut_in || v >= w.v_cut_out) return 0.0;
    if (v >= w.v_rated) return rated_mw;
    return rated_mw * (v - w.v_cut_in) / (w.v_rated - w.v_cut_in);
  }
  const auto& s = solar;
  const double g = std::exp(s.ln_mu + s.ln_sigma * z);
  return std::min(rated_mw, rated_mw * g / s.g_std);
}

double sample_availability(const AvailabilityModel& model, Rng& rng) {
  return model.from_standard_normal(rng.normal());
}

Quadrature gauss_legendre(int points, double lo, double hi) {
  // Nodes as roots of P_n via Newton iteration on the recurrence.
  Quadrature q;
  q.nodes.resize(points);
  q.weights.resize(points);
  const int n = points;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    q.nodes[i] = x;
    q.nodes[n - 1 - i] = -x;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid - half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

}  // namespace opflab::econ
