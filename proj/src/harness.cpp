#include "maglev/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "maglev/discrete.hpp"
#include "maglev/dsmc.hpp"
#include "maglev/linearization.hpp"
#include "maglev/pi_smc.hpp"

namespace maglev::harness {
namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nan("");
  return j.at(key).get<double>();
}

std::string_view abort_reason(plant::SimAbort::Reason reason) {
  switch (reason) {
    case plant::SimAbort::Reason::singular_position: return "singular_position";
    case plant::SimAbort::Reason::non_finite: return "non_finite";
    case plant::SimAbort::Reason::control_fault: return "control_fault";
  }
  return "unknown";
}

json metrics_json(const metrics::MetricReport& m) {
  return {
      {"iae", m.iae},
      {"itae", m.itae},
      {"settling_time", number_or_null(m.settling_time)},
      {"settled", m.settled},
      {"e_delta_max", m.e_delta_max},
      {"chatter_amp", m.chatter_amp},
      {"chatter_freq", m.chatter_freq},
      {"steady", {{"p", m.steady.p}, {"v", m.steady.v}, {"i", m.steady.i}, {"u", m.steady.u}}},
      {"peak_deviation", m.peak_deviation},
      {"position_amplitude", m.position_amplitude},
      {"velocity_ripple", m.velocity_ripple},
      {"current_min", m.current_min},
      {"current_max", m.current_max},
      {"t_final", m.t_final},
  };
}

metrics::MetricReport metrics_from(const json& j) {
  metrics::MetricReport m;
  m.iae = number_from(j, "iae");
  m.itae = number_from(j, "itae");
  m.settling_time = number_from(j, "settling_time");
  m.settled = j.value("settled", false);
  m.e_delta_max = number_from(j, "e_delta_max");
  m.chatter_amp = number_from(j, "chatter_amp");
  m.chatter_freq = number_from(j, "chatter_freq");
  if (j.contains("steady")) {
    const auto& s = j.at("steady");
    m.steady = {number_from(s, "p"), number_from(s, "v"), number_from(s, "i"), number_from(s, "u")};
  }
  m.peak_deviation = number_from(j, "peak_deviation");
  m.position_amplitude = number_from(j, "position_amplitude");
  m.velocity_ripple = number_from(j, "velocity_ripple");
  m.current_min = number_from(j, "current_min");
  m.current_max = number_from(j, "current_max");
  m.t_final = number_from(j, "t_final");
  return m;
}

// Controller callbacks are copied into std::function, so stateful
// controllers live behind a shared pointer the harness can still inspect.
template <typename C>
plant::ControlCallback callback(std::shared_ptr<C> controller) {
  return [controller](const PlantState& x) { return (*controller)(x); };
}

}  // namespace

std::vector<std::string> RunRecord::warnings() const {
  std::vector<std::string> out;
  for (const auto& report : validators) {
    for (const auto& check : report.checks) {
      if (check.pass) continue;
      std::string line = report.validator + ": " + check.name + " fails (margin " +
                         std::to_string(check.margin) + ")";
      if (!check.detail.empty()) line += ", " + check.detail;
      out.push_back(std::move(line));
    }
  }
  return out;
}

std::vector<ValidationReport> validate(const Scenario& scenario) {
  scenario.validate();
  std::vector<ValidationReport> reports;
  try {
    switch (scenario.controller) {
      case ControllerKind::pi_smc: {
        auto gains = scenario.pi;
        gains.k = scenario.feedback_gain();
        reports.push_back(pi_smc::validate_gains(gains, scenario.pi_bounds));
        break;
      }
      case ControllerKind::fl_baseline: {
        const auto model = linearization::BrunovskyModel::standard();
        ValidationReport r;
        r.validator = "fl_baseline";
        const numerics::Matrix closed = model.a + model.b * scenario.feedback_gain();
        r.add("A + BK Hurwitz", numerics::is_hurwitz(closed),
              -numerics::eigenvalues(closed).back().real());
        reports.push_back(std::move(r));
        break;
      }
      case ControllerKind::dsmc: {
        const auto sys = discrete::discretize(linearization::BrunovskyModel::standard(),
                                              scenario.dsmc.tau);
        reports.push_back(dsmc::validate(scenario.dsmc, sys));
        break;
      }
      case ControllerKind::mrof_dsmc:
        reports.push_back(mrof::validate_gain_conditions(scenario.mrof, mrof::build_gains(scenario.mrof)));
        break;
    }
  } catch (const std::domain_error& e) {
    throw ScenarioError(e.what());
  }
  return reports;
}

RunRecord run(const Scenario& scenario) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.scenario = scenario;
  record.validators = validate(scenario);

  const PlantParams& nominal = scenario.params;
  plant::ControlCallback controller;
  std::shared_ptr<mrof::Controller> mrof_controller;
  switch (scenario.controller) {
    case ControllerKind::pi_smc: {
      auto gains = scenario.pi;
      gains.k = scenario.feedback_gain();
      controller = callback(std::make_shared<pi_smc::Controller>(
          nominal, gains, scenario.reference, scenario.dt * scenario.hold_steps()));
      break;
    }
    case ControllerKind::fl_baseline:
      controller = callback(std::make_shared<pi_smc::FlBaselineController>(
          nominal, scenario.feedback_gain(), scenario.reference));
      break;
    case ControllerKind::dsmc:
      controller = callback(std::make_shared<dsmc::Controller>(nominal, scenario.dsmc));
      break;
    case ControllerKind::mrof_dsmc:
      mrof_controller = std::make_shared<mrof::Controller>(nominal, scenario.mrof, scenario.seed);
      controller = callback(mrof_controller);
      break;
  }

  plant::IntegrateOptions options;
  options.dt = scenario.dt;
  options.t_end = scenario.t_end;
  options.hold_steps = scenario.hold_steps();
  options.reference = scenario.reference;
  PlantState initial = scenario.initial;
  initial.t = 0.0;
  record.trace = plant::integrate(scenario.simulated_params(), initial, controller,
                                  scenario.disturbance, options);
  if (record.trace.size() > 0) record.metrics = metrics::compute(record.trace, scenario.window);
  if (mrof_controller) record.reconstruction = mrof_controller->diagnostics();
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::vector<RunRecord> run_batch(std::span<const Scenario> scenarios, int parallelism) {
  if (scenarios.empty()) throw std::invalid_argument("run_batch: empty batch");
  if (parallelism < 1) throw std::invalid_argument("run_batch: parallelism must be >= 1");

  std::vector<RunRecord> records(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < scenarios.size(); j = next++) {
      try {
        records[j] = run(scenarios[j]);
      } catch (const std::exception& e) {
        records[j].scenario = scenarios[j];
        records[j].error = e.what();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), scenarios.size());
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < threads; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

Summary summarize(const RunRecord& record) {
  Summary s;
  s.name = record.scenario.name;
  s.controller = std::string(to_string(record.scenario.controller));
  s.aborted = record.aborted();
  if (record.metrics) {
    s.metrics = *record.metrics;
    s.t_final = record.metrics->t_final;
  }
  return s;
}

Summary summary_from_report(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!j.contains("name") || !j.contains("controller") || !j.contains("metrics")) {
    throw ScenarioError("report lacks name, controller or metrics");
  }
  Summary s;
  s.name = j.at("name").get<std::string>();
  s.controller = j.at("controller").get<std::string>();
  s.aborted = j.contains("abort") && !j.at("abort").is_null();
  if (!j.at("metrics").is_null()) {
    s.metrics = metrics_from(j.at("metrics"));
    s.t_final = s.metrics.t_final;
  }
  return s;
}

std::string compare(std::span<const Summary> rows) {
  if (rows.empty()) throw std::invalid_argument("compare: no records");
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %-12s %7s %12s %12s %9s %10s %10s %10s\n", "run",
                "controller", "t_f", "IAE", "ITAE", "t_s", "e_dmax", "chatter", "chat_Hz");
  out << line;
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    char ts[16];
    if (m.settled) {
      std::snprintf(ts, sizeof ts, "%9.3f", m.settling_time);
    } else {
      std::snprintf(ts, sizeof ts, "%9s", "-");
    }
    std::snprintf(line, sizeof line, "%-28s %-12s %7.2f %12.4e %12.4e %s %10.4f %10.4g %10.3f%s\n",
                  r.name.c_str(), r.controller.c_str(), r.t_final, m.iae, m.itae, ts,
                  m.e_delta_max, m.chatter_amp, m.chatter_freq, r.aborted ? "  (aborted)" : "");
    out << line;
  }
  return out.str();
}

std::string trace_csv(const plant::SimTrace& trace) {
  std::string out = "t,p,v,i,u,s,s_tilde\n";
  out.reserve(out.size() + trace.size() * 96);
  char line[256];
  auto cell = [](double v) {
    if (!std::isfinite(v)) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& x = trace.states[k];
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g,%.10g,%.10g,", trace.t[k], x.p, x.v, x.i,
                  trace.u[k]);
    out += line;
    out += cell(trace.s[k]);
    out += ',';
    out += cell(trace.s_tilde[k]);
    out += '\n';
  }
  return out;
}

std::string report_json(const RunRecord& record) {
  json j;
  j["name"] = record.scenario.name;
  j["description"] = record.scenario.description;
  j["controller"] = to_string(record.scenario.controller);
  j["seed"] = record.scenario.seed;
  j["scenario"] = write_scenario(record.scenario);
  j["samples"] = record.trace.size();
  j["completed"] = !record.aborted();
  j["wall_seconds"] = record.wall_seconds;
  j["metrics"] = record.metrics ? metrics_json(*record.metrics) : json(nullptr);
  if (record.trace.abort) {
    const auto& a = *record.trace.abort;
    j["abort"] = {{"reason", abort_reason(a.reason)}, {"t", a.t}, {"message", a.message}};
  } else if (!record.error.empty()) {
    j["abort"] = {{"reason", "error"}, {"message", record.error}};
  } else {
    j["abort"] = nullptr;
  }
  json validators = json::array();
  for (const auto& report : record.validators) {
    json checks = json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", number_or_null(c.margin)},
                        {"detail", c.detail}});
    }
    validators.push_back({{"validator", report.validator}, {"all_pass", report.all_pass()},
                          {"checks", checks}});
  }
  j["validators"] = validators;
  j["warnings"] = record.warnings();
  if (record.reconstruction) {
    j["reconstruction"] = {
        {"max_error", record.reconstruction->max_reconstruction_error},
        {"steps", record.reconstruction->steps},
        {"latest_sample_lag", number_or_null(record.reconstruction->latest_sample_lag)}};
  }
  return j.dump(2) + "\n";
}

void write_outputs(const RunRecord& record, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / record.scenario.name;
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
  };
  write(base.string() + ".csv", trace_csv(record.trace));
  write(base.string() + ".json", report_json(record));
  write(base.string() + ".scenario", write_scenario(record.scenario));
}

}  // namespace maglev::harness
