#pragma once

// Grid data model: buses, branches, generators, validated radial cases,
// graph topology (adjacency / Laplacian / scaled Laplacian) and per-interval
// feature snapshots.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace opflab::grid {

enum class BusKind { Slack, Load, GeneratorAttached };

struct Bus {
  int id = 0;  // 1-based external id; vectors are indexed by id-1
  BusKind kind = BusKind::Load;
  double load_p_mw = 0.0;
  double load_q_mvar = 0.0;
  double v_min = 0.95;
  double v_max = 1.05;
};

struct Branch {
  int from = 0;
  int to = 0;
  double resistance = 0.0;  // p.u.
  double reactance = 0.0;   // p.u.
  double conductance = 0.0;  // G = r / (r^2 + x^2)
  double susceptance = 0.0;  // B = -x / (r^2 + x^2)
  double s_max_mva = 0.0;
  double i_thermal = 0.0;  // p.u. current limit
};

enum class GeneratorKind { Thermal, Wind, Solar };

struct ThermalCost {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
};

struct WindParams {
  double direct_coeff = 1.6;   // f
  double reserve_coeff = 3.0;  // h_r
  double penalty_coeff = 1.5;  // h_p
  double weibull_k = 2.0;
  double weibull_c = 9.0;   // m/s
  double v_cut_in = 3.0;    // m/s
  double v_rated = 16.0;    // m/s
  double v_cut_out = 25.0;  // m/s
};

struct SolarParams {
  double direct_coeff = 1.6;   // g
  double reserve_coeff = 3.0;  // h_r
  double penalty_coeff = 1.5;  // h_p
  double ln_mu = 6.0;          // of irradiance, W/m^2
  double ln_sigma = 0.6;
  double g_std = 800.0;  // standard irradiance, W/m^2
};

struct Generator {
  GeneratorKind kind = GeneratorKind::Thermal;
  int bus = 0;
  double p_min_mw = 0.0;
  double p_max_mw = 0.0;
  double q_min_mvar = 0.0;
  double q_max_mvar = 0.0;
  ThermalCost thermal;
  WindParams wind;
  SolarParams solar;
};

struct GridCase {
  std::string name;
  double base_mva = 100.0;
  double base_kv = 12.66;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  int bus_count() const { return static_cast<int>(buses.size()); }          // N
  int branch_count() const { return static_cast<int>(branches.size()); }    // N_b
  int generator_count() const { return static_cast<int>(generators.size()); }
  int count_kind(GeneratorKind k) const;
  int slack_bus() const;  // 1-based id
  double total_load_p_mw() const;
  double total_load_q_mvar() const;
  // Generators attached to a 1-based bus id (indices into `generators`).
  std::vector<int> generators_at(int bus_id) const;
};

// Parses and validates a case file; throws std::runtime_error with a
// descriptive message on schema violations, non-radial topology,
// duplicate ids or count mismatches.
GridCase load_case(const std::filesystem::path& path);
GridCase parse_case(std::istream& in, const std::string& origin = "<stream>");

struct GraphTopology {
  int n = 0;
  std::vector<double> adjacency;         // n*n, 0/1, zero diagonal
  std::vector<double> laplacian;         // L = D - A
  std::vector<double> scaled_laplacian;  // 2 L / lambda_max - I
  double lambda_max = 0.0;
  std::vector<std::vector<int>> neighbors;  // 0-based, sorted
};

// Builds A, L and the scaled Laplacian; lambda_max from power iteration
// at relative tolerance 1e-10. Throws on disconnected graphs.
GraphTopology build_topology(const GridCase& c);

struct GraphSnapshot {
  long long time_index = 0;
  int n = 0;
  int width = 0;  // F
  std::vector<double> x;  // n*width, row i = features of bus i+1

  double at(int node, int feature) const { return x[node * width + feature]; }
};

// Feature width used by snapshots: P, Q, |V|, angle, then one |S| slot
// per incident branch of the highest-degree node.
int feature_width(const GridCase& c);

}  // namespace opflab::grid
