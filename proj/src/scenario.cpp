#include "maglev/scenario.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "maglev/linearization.hpp"

namespace maglev::harness {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(value)) {
    throw ScenarioError(std::string(key) + ": expected a finite number, got '" + s + "'");
  }
  return value;
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(to_double(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Vec3 to_vec3(std::string_view key, std::string_view text) {
  const auto v = to_list(key, text);
  if (v.size() != 3) throw ScenarioError(std::string(key) + ": expected 3 comma-separated values");
  return {v[0], v[1], v[2]};
}

mrof::Bounds to_bounds(std::string_view key, std::string_view text) {
  const auto v = to_list(key, text);
  if (v.size() != 2) throw ScenarioError(std::string(key) + ": expected 'lower, upper'");
  return {v[0], v[1]};
}

int to_int(std::string_view key, std::string_view text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e6) {
    throw ScenarioError(std::string(key) + ": expected an integer");
  }
  return static_cast<int>(v);
}

unsigned long long to_seed(std::string_view key, std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s.front() == '-') {
    throw ScenarioError(std::string(key) + ": expected a non-negative integer");
  }
  return value;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec(const Vec3& v) { return num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]); }

std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j) out += ", ";
    out += num(v[j]);
  }
  return out;
}

std::string bounds(const mrof::Bounds& b) { return num(b.lower) + ", " + num(b.upper); }

plant::ReferenceKind parse_reference(std::string_view text) {
  if (text == "constant") return plant::ReferenceKind::constant;
  if (text == "square") return plant::ReferenceKind::square;
  if (text == "sine") return plant::ReferenceKind::sine;
  throw ScenarioError("reference.kind: expected constant, square or sine");
}

std::string_view reference_name(plant::ReferenceKind kind) {
  switch (kind) {
    case plant::ReferenceKind::constant: return "constant";
    case plant::ReferenceKind::square: return "square";
    case plant::ReferenceKind::sine: return "sine";
  }
  return "constant";
}

plant::DisturbanceKind parse_disturbance(std::string_view text) {
  if (text == "none") return plant::DisturbanceKind::none;
  if (text == "constant") return plant::DisturbanceKind::constant;
  if (text == "sinusoid") return plant::DisturbanceKind::sinusoid;
  if (text == "samples") return plant::DisturbanceKind::samples;
  throw ScenarioError("disturbance.kind: expected none, constant, sinusoid or samples");
}

std::string_view disturbance_name(plant::DisturbanceKind kind) {
  switch (kind) {
    case plant::DisturbanceKind::none: return "none";
    case plant::DisturbanceKind::constant: return "constant";
    case plant::DisturbanceKind::sinusoid: return "sinusoid";
    case plant::DisturbanceKind::samples: return "samples";
  }
  return "none";
}

using Setter = std::function<void(Scenario&, std::string_view key, std::string_view value)>;

template <typename Field>
Setter number(Field field) {
  return [field](Scenario& s, std::string_view key, std::string_view v) {
    std::invoke(field, s) = to_double(key, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"name", [](Scenario& s, auto, auto v) { s.name = std::string(v); }},
      {"description", [](Scenario& s, auto, auto v) { s.description = std::string(v); }},
      {"controller", [](Scenario& s, auto, auto v) { s.controller = parse_controller(v); }},

      {"plant.resistance", number([](Scenario& s) -> double& { return s.params.resistance; })},
      {"plant.inductance", number([](Scenario& s) -> double& { return s.params.inductance; })},
      {"plant.gravity", number([](Scenario& s) -> double& { return s.params.gravity; })},
      {"plant.mass", number([](Scenario& s) -> double& { return s.params.mass; })},
      {"plant.permeability", number([](Scenario& s) -> double& { return s.params.permeability; })},
      {"plant.pole_area", number([](Scenario& s) -> double& { return s.params.pole_area; })},
      {"plant.turns", number([](Scenario& s) -> double& { return s.params.turns; })},
      {"plant.force_constant",
       number([](Scenario& s) -> double& { return s.params.force_constant; })},
      {"plant.setpoint", number([](Scenario& s) -> double& { return s.params.setpoint; })},
      {"plant.mass_factor", number([](Scenario& s) -> double& { return s.mass_factor; })},

      {"initial.p", number([](Scenario& s) -> double& { return s.initial.p; })},
      {"initial.v", number([](Scenario& s) -> double& { return s.initial.v; })},
      {"initial.i", number([](Scenario& s) -> double& { return s.initial.i; })},

      {"reference.kind", [](Scenario& s, auto, auto v) { s.reference.kind = parse_reference(v); }},
      {"reference.amplitude", number([](Scenario& s) -> double& { return s.reference.amplitude; })},
      {"reference.frequency", number([](Scenario& s) -> double& { return s.reference.frequency; })},

      {"disturbance.kind",
       [](Scenario& s, auto, auto v) { s.disturbance.kind = parse_disturbance(v); }},
      {"disturbance.frame",
       [](Scenario& s, auto, std::string_view v) {
         if (v == "original") {
           s.disturbance.frame = plant::DisturbanceFrame::original;
         } else if (v == "transformed") {
           s.disturbance.frame = plant::DisturbanceFrame::transformed;
         } else {
           throw ScenarioError("disturbance.frame: expected original or transformed");
         }
       }},
      {"disturbance.amplitude",
       [](Scenario& s, auto k, auto v) { s.disturbance.amplitude = to_vec3(k, v); }},
      {"disturbance.frequency",
       number([](Scenario& s) -> double& { return s.disturbance.frequency; })},
      {"disturbance.hold", number([](Scenario& s) -> double& { return s.disturbance.hold; })},
      {"disturbance.sample_times",
       [](Scenario& s, auto k, auto v) { s.disturbance.sample_times = to_list(k, v); }},
      {"disturbance.sample_values",
       [](Scenario& s, auto k, auto v) { s.disturbance.sample_values = to_list(k, v); }},

      {"sim.dt", number([](Scenario& s) -> double& { return s.dt; })},
      {"sim.t_end", number([](Scenario& s) -> double& { return s.t_end; })},
      {"sim.seed", [](Scenario& s, auto k, auto v) { s.seed = to_seed(k, v); }},
      {"sim.control_period", number([](Scenario& s) -> double& { return s.control_period; })},

      {"control.poles", [](Scenario& s, auto k, auto v) { s.poles = to_vec3(k, v); }},
      {"control.k", [](Scenario& s, auto k, auto v) { s.k = to_vec3(k, v); }},

      {"pi_smc.m", [](Scenario& s, auto k, auto v) { s.pi.m = to_vec3(k, v); }},
      {"pi_smc.k4", number([](Scenario& s) -> double& { return s.pi.k4; })},
      {"pi_smc.k5", number([](Scenario& s) -> double& { return s.pi.k5; })},
      {"pi_smc.k0", number([](Scenario& s) -> double& { return s.pi.k0; })},
      {"pi_smc.alpha", number([](Scenario& s) -> double& { return s.pi.alpha_pow; })},
      {"pi_smc.eta", number([](Scenario& s) -> double& { return s.pi.eta; })},
      {"pi_smc.bounds", [](Scenario& s, auto k, auto v) { s.pi_bounds = to_vec3(k, v); }},

      {"dsmc.m", [](Scenario& s, auto k, auto v) { s.dsmc.m = to_vec3(k, v); }},
      {"dsmc.q", number([](Scenario& s) -> double& { return s.dsmc.q; })},
      {"dsmc.eps", number([](Scenario& s) -> double& { return s.dsmc.eps; })},
      {"dsmc.tau", number([](Scenario& s) -> double& { return s.dsmc.tau; })},
      {"dsmc.d_m", number([](Scenario& s) -> double& { return s.dsmc.d_m; })},
      {"dsmc.d_s", number([](Scenario& s) -> double& { return s.dsmc.d_s; })},

      {"mrof.tau", number([](Scenario& s) -> double& { return s.mrof.tau; })},
      {"mrof.rho", number([](Scenario& s) -> double& { return s.mrof.rho; })},
      {"mrof.n", [](Scenario& s, auto k, auto v) { s.mrof.n = to_int(k, v); }},
      {"mrof.q", number([](Scenario& s) -> double& { return s.mrof.q; })},
      {"mrof.eps", number([](Scenario& s) -> double& { return s.mrof.eps; })},
      {"mrof.m", [](Scenario& s, auto k, auto v) { s.mrof.m = to_vec3(k, v); }},
      {"mrof.d", [](Scenario& s, auto k, auto v) { s.mrof.d = to_bounds(k, v); }},
      {"mrof.r", [](Scenario& s, auto k, auto v) { s.mrof.r = to_bounds(k, v); }},
      {"mrof.noise", [](Scenario& s, auto k, auto v) { s.mrof.noise = to_bounds(k, v); }},
      {"mrof.output_scale", number([](Scenario& s) -> double& { return s.mrof.output_scale; })},
      {"mrof.noise_std", number([](Scenario& s) -> double& { return s.mrof.sensor_noise_std; })},
      {"mrof.sigma_s", [](Scenario& s, auto k, auto v) { s.mrof.sigma_s = to_double(k, v); }},

      {"metrics.steady_fraction",
       number([](Scenario& s) -> double& { return s.window.steady_fraction; })},
      {"metrics.band_fraction",
       number([](Scenario& s) -> double& { return s.window.band_fraction; })},
  };
  return table;
}

bool is_integer_ratio(double num, double den) {
  const double ratio = num / den;
  return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio) && ratio >= 0.5;
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::pi_smc: return "pi_smc";
    case ControllerKind::fl_baseline: return "fl_baseline";
    case ControllerKind::dsmc: return "dsmc";
    case ControllerKind::mrof_dsmc: return "mrof_dsmc";
  }
  return "pi_smc";
}

ControllerKind parse_controller(std::string_view text) {
  for (auto kind : {ControllerKind::pi_smc, ControllerKind::fl_baseline, ControllerKind::dsmc,
                    ControllerKind::mrof_dsmc}) {
    if (text == to_string(kind)) return kind;
  }
  throw ScenarioError("controller: expected pi_smc, fl_baseline, dsmc or mrof_dsmc, got '" +
                      std::string(text) + "'");
}

PlantParams Scenario::simulated_params() const {
  PlantParams p = params;
  p.mass *= mass_factor;
  return p;
}

numerics::RowVector Scenario::feedback_gain() const {
  if (k) {
    numerics::RowVector out(3);
    out << (*k)[0], (*k)[1], (*k)[2];
    return out;
  }
  const std::array<numerics::Complex, 3> roots{poles[0], poles[1], poles[2]};
  return pi_smc::PiSmcGains::from_poles(roots).k;
}

int Scenario::hold_steps() const {
  double period = dt;
  switch (controller) {
    case ControllerKind::pi_smc:
    case ControllerKind::fl_baseline:
      period = control_period > 0.0 ? control_period : dt;
      break;
    case ControllerKind::dsmc:
      period = dsmc.tau;
      break;
    case ControllerKind::mrof_dsmc:
      period = mrof.rho;
      break;
  }
  return static_cast<int>(std::lround(period / dt));
}

void Scenario::validate() const {
  try {
    params.validate();
    disturbance.validate();
    if (controller == ControllerKind::dsmc) dsmc.validate();
    if (controller == ControllerKind::mrof_dsmc) mrof.validate();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (!(mass_factor > 0.0)) throw ScenarioError("plant.mass_factor must be > 0");
  if (!(dt > 0.0) || !(t_end >= dt)) throw ScenarioError("need sim.dt > 0 and sim.t_end >= sim.dt");
  if (!(initial.p > kMinPosition) || !std::isfinite(initial.v) || !std::isfinite(initial.i)) {
    throw ScenarioError("initial state must be finite with p above the singularity guard");
  }
  if (!(reference.frequency > 0.0) ||
      !(params.setpoint - std::abs(reference.amplitude) > kMinPosition)) {
    throw ScenarioError("reference must stay above the singularity guard with frequency > 0");
  }
  if (!(window.steady_fraction > 0.0 && window.steady_fraction <= 1.0) ||
      !(window.band_fraction > 0.0)) {
    throw ScenarioError("metrics window fractions out of range");
  }
  if (control_period < 0.0) throw ScenarioError("sim.control_period must be >= 0");

  const bool discrete = controller == ControllerKind::dsmc || controller == ControllerKind::mrof_dsmc;
  if (discrete && reference.kind != plant::ReferenceKind::constant) {
    throw ScenarioError("discrete controllers regulate to plant.setpoint; use a constant reference");
  }
  double period = dt;
  const char* what = "sim.control_period";
  if (controller == ControllerKind::dsmc) {
    period = dsmc.tau;
    what = "dsmc.tau";
  } else if (controller == ControllerKind::mrof_dsmc) {
    period = mrof.rho;
    what = "mrof.rho";
  } else if (control_period > 0.0) {
    period = control_period;
  }
  if (!is_integer_ratio(period, dt)) {
    throw ScenarioError(std::string(what) + " must be a whole multiple of sim.dt");
  }
  for (double b : pi_bounds) {
    if (!(b >= 0.0)) throw ScenarioError("pi_smc.bounds must be >= 0");
  }
  if (controller == ControllerKind::pi_smc && pi.m[2] == 0.0) {
    throw ScenarioError("pi_smc.m: last surface weight must be nonzero");
  }
}

void set_field(Scenario& scenario, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ScenarioError("unknown key '" + std::string(key) + "'");
  it->second(scenario, key, trim(value));
}

Scenario parse_scenario(std::string_view text) {
  Scenario scenario;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_field(scenario, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ScenarioError& e) {
      throw ScenarioError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string write_scenario(const Scenario& s) {
  std::ostringstream out;
  auto put = [&](std::string_view key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  put("name", s.name);
  if (!s.description.empty()) put("description", s.description);
  put("controller", std::string(to_string(s.controller)));
  out << '\n';
  put("plant.resistance", num(s.params.resistance));
  put("plant.inductance", num(s.params.inductance));
  put("plant.gravity", num(s.params.gravity));
  put("plant.mass", num(s.params.mass));
  put("plant.permeability", num(s.params.permeability));
  put("plant.pole_area", num(s.params.pole_area));
  put("plant.turns", num(s.params.turns));
  put("plant.force_constant", num(s.params.force_constant));
  put("plant.setpoint", num(s.params.setpoint));
  put("plant.mass_factor", num(s.mass_factor));
  out << '\n';
  put("initial.p", num(s.initial.p));
  put("initial.v", num(s.initial.v));
  put("initial.i", num(s.initial.i));
  out << '\n';
  put("reference.kind", std::string(reference_name(s.reference.kind)));
  put("reference.amplitude", num(s.reference.amplitude));
  put("reference.frequency", num(s.reference.frequency));
  out << '\n';
  put("disturbance.kind", std::string(disturbance_name(s.disturbance.kind)));
  put("disturbance.frame",
      s.disturbance.frame == plant::DisturbanceFrame::original ? "original" : "transformed");
  put("disturbance.amplitude", vec(s.disturbance.amplitude));
  put("disturbance.frequency", num(s.disturbance.frequency));
  put("disturbance.hold", num(s.disturbance.hold));
  if (!s.disturbance.sample_times.empty() || !s.disturbance.sample_values.empty()) {
    put("disturbance.sample_times", list(s.disturbance.sample_times));
    put("disturbance.sample_values", list(s.disturbance.sample_values));
  }
  out << '\n';
  put("sim.dt", num(s.dt));
  put("sim.t_end", num(s.t_end));
  put("sim.seed", std::to_string(s.seed));
  put("sim.control_period", num(s.control_period));
  out << '\n';
  put("control.poles", vec(s.poles));
  if (s.k) put("control.k", vec(*s.k));
  put("pi_smc.m", vec(s.pi.m));
  put("pi_smc.k4", num(s.pi.k4));
  put("pi_smc.k5", num(s.pi.k5));
  put("pi_smc.k0", num(s.pi.k0));
  put("pi_smc.alpha", num(s.pi.alpha_pow));
  put("pi_smc.eta", num(s.pi.eta));
  put("pi_smc.bounds", vec(s.pi_bounds));
  out << '\n';
  put("dsmc.m", vec(s.dsmc.m));
  put("dsmc.q", num(s.dsmc.q));
  put("dsmc.eps", num(s.dsmc.eps));
  put("dsmc.tau", num(s.dsmc.tau));
  put("dsmc.d_m", num(s.dsmc.d_m));
  put("dsmc.d_s", num(s.dsmc.d_s));
  out << '\n';
  put("mrof.tau", num(s.mrof.tau));
  put("mrof.rho", num(s.mrof.rho));
  put("mrof.n", std::to_string(s.mrof.n));
  put("mrof.q", num(s.mrof.q));
  put("mrof.eps", num(s.mrof.eps));
  put("mrof.m", vec(s.mrof.m));
  put("mrof.d", bounds(s.mrof.d));
  put("mrof.r", bounds(s.mrof.r));
  put("mrof.noise", bounds(s.mrof.noise));
  put("mrof.output_scale", num(s.mrof.output_scale));
  put("mrof.noise_std", num(s.mrof.sensor_noise_std));
  if (s.mrof.sigma_s) put("mrof.sigma_s", num(*s.mrof.sigma_s));
  out << '\n';
  put("metrics.steady_fraction", num(s.window.steady_fraction));
  put("metrics.band_fraction", num(s.window.band_fraction));
  return out.str();
}

}  // namespace maglev::harness
