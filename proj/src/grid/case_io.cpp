#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "opflab/grid.hpp"

namespace opflab::grid {

int GridCase::count_kind(GeneratorKind k) const {
  int n = 0;
  for (const auto& g : generators)
    if (g.kind == k) ++n;
  return n;
}

int GridCase::slack_bus() const {
  for (const auto& b : buses)
    if (b.kind == BusKind::Slack) return b.id;
  return -1;
}

double GridCase::total_load_p_mw() const {
  double s = 0;
  for (const auto& b : buses) s += b.load_p_mw;
  return s;
}

double GridCase::total_load_q_mvar() const {
  double s = 0;
  for (const auto& b : buses) s += b.load_q_mvar;
  return s;
}

std::vector<int> GridCase::generators_at(int bus_id) const {
  std::vector<int> out;
  for (int i = 0; i < generator_count(); ++i)
    if (generators[i].bus == bus_id) out.push_back(i);
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

double to_num(const std::string& s, const std::string& origin, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(origin, line, "not a number: '" + s + "'");
  }
}

void validate(GridCase& c, const std::map<std::string, int>& declared,
              const std::string& origin) {
  const int n = c.bus_count();
  if (n < 2) throw std::runtime_error(origin + ": case needs at least 2 buses");

  std::set<int> ids;
  int slack_count = 0;
  for (const auto& b : c.buses) {
    if (!ids.insert(b.id).second)
      throw std::runtime_error(origin + ": duplicate bus id " + std::to_string(b.id));
    if (b.id < 1 || b.id > n)
      throw std::runtime_error(origin + ": bus ids must be 1.." + std::to_string(n));
    if (!(b.v_min > 0.0 && b.v_min < b.v_max))
      throw std::runtime_error(origin + ": bus " + std::to_string(b.id) +
                               " needs 0 < v_min < v_max");
    if (b.kind == BusKind::Slack) ++slack_count;
  }
  if (slack_count != 1)
    throw std::runtime_error(origin + ": exactly one slack bus required, got " +
                             std::to_string(slack_count));

  if (c.branch_count() != n - 1)
    throw std::runtime_error(origin + ": non-radial topology: " +
                             std::to_string(c.branch_count()) + " branches for " +
                             std::to_string(n) + " buses");

  for (auto& br : c.branches) {
    if (br.from == br.to)
      throw std::runtime_error(origin + ": branch with identical endpoints " +
                               std::to_string(br.from));
    if (br.from < 1 || br.from > n || br.to < 1 || br.to > n)
      throw std::runtime_error(origin + ": branch endpoint out of range");
    const double z2 = br.resistance * br.resistance + br.reactance * br.reactance;
    if (z2 <= 0.0)
      throw std::runtime_error(origin + ": branch " + std::to_string(br.from) + "-" +
                               std::to_string(br.to) + " has zero impedance");
    br.conductance = br.resistance / z2;
    br.susceptance = -br.reactance / z2;
  }

  // connectivity (union-find)
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& br : c.branches) {
    const int a = find(br.from - 1), b = find(br.to - 1);
    if (a == b)
      throw std::runtime_error(origin + ": cycle through branch " +
                               std::to_string(br.from) + "-" + std::to_string(br.to));
    parent[a] = b;
  }
  for (int i = 1; i < n; ++i)
    if (find(0) != find(i))
      throw std::runtime_error(origin + ": disconnected graph (bus " +
                               std::to_string(i + 1) + ")");

  std::set<int> gen_buses;
  for (const auto& g : c.generators) {
    if (g.bus < 1 || g.bus > n)
      throw std::runtime_error(origin + ": generator bus out of range");
    if (!gen_buses.insert(g.bus).second)
      throw std::runtime_error(origin + ": more than one generator at bus " +
                               std::to_string(g.bus));
    if (g.p_min_mw > g.p_max_mw || g.q_min_mvar > g.q_max_mvar)
      throw std::runtime_error(origin + ": generator bounds inverted at bus " +
                               std::to_string(g.bus));
    if (g.kind == GeneratorKind::Thermal && (g.thermal.d < 0 || g.thermal.e < 0))
      throw std::runtime_error(origin + ": thermal d,e must be >= 0 at bus " +
                               std::to_string(g.bus));
    if (g.kind == GeneratorKind::Wind) {
      const auto& w = g.wind;
      if (!(w.weibull_k > 0 && w.weibull_c > 0))
        throw std::runtime_error(origin + ": wind Weibull parameters must be > 0");
      if (!(w.v_cut_in < w.v_rated && w.v_rated < w.v_cut_out))
        throw std::runtime_error(origin + ": wind speeds need cut-in < rated < cut-out");
    }
    if (g.kind == GeneratorKind::Solar && !(g.solar.ln_sigma > 0))
      throw std::runtime_error(origin + ": solar ln_sigma must be > 0");
  }

  auto check_count = [&](const char* key, int actual) {
    auto it = declared.find(key);
    if (it != declared.end() && it->second != actual)
      throw std::runtime_error(origin + ": declared " + key + "=" +
                               std::to_string(it->second) + " but found " +
                               std::to_string(actual));
  };
  check_count("buses", c.bus_count());
  check_count("branches", c.branch_count());
  check_count("thermal", c.count_kind(GeneratorKind::Thermal));
  check_count("wind", c.count_kind(GeneratorKind::Wind));
  check_count("solar", c.count_kind(GeneratorKind::Solar));

  std::sort(c.buses.begin(), c.buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });
}

}  // namespace

GridCase parse_case(std::istream& in, const std::string& origin) {
  GridCase c;
  std::map<std::string, int> declared;
  double z_scale = 1.0;  // impedance unit conversion factor, applied at end
  bool z_in_ohm = false;
  bool version_seen = false;
  std::string section;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto tk = tokens(line);
    if (tk.empty()) continue;
    if (tk[0] == "version") {
      if (tk.size() != 2 || tk[1] != "1")
        fail(origin, ln, "unsupported case format version");
      version_seen = true;
      continue;
    }
    if (tk[0].front() == '[') {
      section = tk[0];
      continue;
    }
    if (!version_seen) fail(origin, ln, "missing 'version 1' header");
    if (section == "[base]") {
      if (tk.size() < 2) fail(origin, ln, "base entries are 'key value'");
      const std::string& key = tk[0];
      if (key == "name") c.name = tk[1];
      else if (key == "mva") c.base_mva = to_num(tk[1], origin, ln);
      else if (key == "kv") c.base_kv = to_num(tk[1], origin, ln);
      else if (key == "z_unit") {
        if (tk[1] == "ohm") z_in_ohm = true;
        else if (tk[1] != "pu") fail(origin, ln, "z_unit must be 'ohm' or 'pu'");
      } else if (key == "count") {
        if (tk.size() != 3) fail(origin, ln, "count entries are 'count what n'");
        declared[tk[1]] = static_cast<int>(to_num(tk[2], origin, ln));
      } else fail(origin, ln, "unknown base key '" + key + "'");
    } else if (section == "[buses]") {
      if (tk.size() != 6) fail(origin, ln, "bus rows: id kind Pload Qload Vmin Vmax");
      Bus b;
      b.id = static_cast<int>(to_num(tk[0], origin, ln));
      if (tk[1] == "slack") b.kind = BusKind::Slack;
      else if (tk[1] == "load") b.kind = BusKind::Load;
      else if (tk[1] == "gen") b.kind = BusKind::GeneratorAttached;
      else fail(origin, ln, "bus kind must be slack|load|gen");
      b.load_p_mw = to_num(tk[2], origin, ln);
      b.load_q_mvar = to_num(tk[3], origin, ln);
      b.v_min = to_num(tk[4], origin, ln);
      b.v_max = to_num(tk[5], origin, ln);
      c.buses.push_back(b);
    } else if (section == "[branches]") {
      if (tk.size() != 6) fail(origin, ln, "branch rows: from to R X Smax Imax");
      Branch br;
      br.from = static_cast<int>(to_num(tk[0], origin, ln));
      br.to = static_cast<int>(to_num(tk[1], origin, ln));
      br.resistance = to_num(tk[2], origin, ln);
      br.reactance = to_num(tk[3], origin, ln);
      br.s_max_mva = to_num(tk[4], origin, ln);
      br.i_thermal = to_num(tk[5], origin, ln);
      c.branches.push_back(br);
    } else if (section == "[generators]") {
      if (tk.size() < 7) fail(origin, ln, "generator rows too short");
      Generator g;
      if (tk[0] == "thermal") g.kind = GeneratorKind::Thermal;
      else if (tk[0] == "wind") g.kind = GeneratorKind::Wind;
      else if (tk[0] == "solar") g.kind = GeneratorKind::Solar;
      else fail(origin, ln, "generator kind must be thermal|wind|solar");
      g.bus = static_cast<int>(to_num(tk[1], origin, ln));
      g.p_min_mw = to_num(tk[2], origin, ln);
      g.p_max_mw = to_num(tk[3], origin, ln);
      g.q_min_mvar = to_num(tk[4], origin, ln);
      g.q_max_mvar = to_num(tk[5], origin, ln);
      const std::size_t nc = tk.size() - 6;
      auto coeff = [&](std::size_t i) { return to_num(tk[6 + i], origin, ln); };
      if (g.kind == GeneratorKind::Thermal) {
        if (nc != 5) fail(origin, ln, "thermal rows end with: a b c d e");
        g.thermal = {coeff(0), coeff(1), coeff(2), coeff(3), coeff(4)};
      } else if (g.kind == GeneratorKind::Wind) {
        if (nc != 8) fail(origin, ln, "wind rows end with: f hr hp k c vin vrated vout");
        g.wind = {coeff(0), coeff(1), coeff(2), coeff(3),
                  coeff(4), coeff(5), coeff(6), coeff(7)};
      } else {
        if (nc != 6) fail(origin, ln, "solar rows end with: g hr hp mu sigma gstd");
        g.solar = {coeff(0), coeff(1), coeff(2), coeff(3), coeff(4), coeff(5)};
      }
      c.generators.push_back(g);
    } else {
      fail(origin, ln, "content outside any [section]");
    }
  }
  if (z_in_ohm) {
    const double z_base = c.base_kv * c.base_kv / c.base_mva;
    z_scale = 1.0 / z_base;
    for (auto& br : c.branches) {
      br.resistance *= z_scale;
      br.reactance *= z_scale;
    }
  }
  validate(c, declared, origin);
  return c;
}

GridCase load_case(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open case file: " + path.string());
  return parse_case(is, path.string());
}

}  // namespace opflab::grid
