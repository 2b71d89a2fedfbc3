// Command-line front end for the levitation simulations.
//
//   maglev_cli simulate <scenario-file>...   run scenario files
//   maglev_cli preset <name>...              run built-in presets
//   maglev_cli compare <report.json>...      tabulate earlier runs
//   maglev_cli validate <scenario-file>      check a scenario without running it
//   maglev_cli list-presets
//
// Exit status: 0 success, 1 invalid input, 2 a run aborted.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maglev/harness.hpp"
#include "maglev/presets.hpp"
#include "maglev/scenario.hpp"

namespace {

using namespace maglev::harness;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kAborted = 2;

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<unsigned long long> seed;
  std::string out;
  int parallel = 1;

  void apply(Scenario& s) const {
    if (dt) s.dt = *dt;
    if (t_end) s.t_end = *t_end;
    if (seed) s.seed = *seed;
  }
};

void print_record(const RunRecord& r) {
  std::cout << "== " << r.scenario.name;
  if (!r.scenario.description.empty()) std::cout << ": " << r.scenario.description;
  std::cout << '\n';
  if (!r.error.empty()) {
    std::cout << "   error: " << r.error << '\n';
    return;
  }
  for (const auto& w : r.warnings()) std::cout << "   warning: " << w << '\n';
  if (r.trace.abort) {
    std::cout << "   aborted at t = " << r.trace.abort->t << " s: " << r.trace.abort->message
              << '\n';
  }
  if (r.metrics) {
    const auto& m = *r.metrics;
    std::printf("   p_ss %.6g m  i_ss %.6g A  u_ss %.6g V  t_s %s  IAE %.4g  chatter %.4g V\n",
                m.steady.p, m.steady.i, m.steady.u,
                m.settled ? (std::to_string(m.settling_time) + " s").c_str() : "not settled",
                m.iae, m.chatter_amp);
  }
  if (r.reconstruction) {
    std::printf("   reconstruction error max %.3g over %ld steps\n",
                r.reconstruction->max_reconstruction_error, r.reconstruction->steps);
  }
}

int run_all(std::vector<Scenario> scenarios, const Overrides& o) {
  for (auto& s : scenarios) {
    o.apply(s);
    s.validate();
  }
  const auto records = run_batch(scenarios, o.parallel);
  int status = kOk;
  std::vector<Summary> rows;
  for (const auto& r : records) {
    print_record(r);
    if (!r.error.empty()) {
      status = std::max(status, kInvalid);
      continue;
    }
    if (r.trace.abort) status = kAborted;
    if (!o.out.empty()) write_outputs(r, o.out);
    rows.push_back(summarize(r));
  }
  if (rows.size() > 1) std::cout << '\n' << compare(rows);
  return status;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic levitation sliding mode control simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  double dt = 0.0;
  double t_end = 0.0;
  unsigned long long seed = 0;
  auto* dt_opt = app.add_option("--dt", dt, "Integration step in seconds")->check(CLI::PositiveNumber);
  auto* t_end_opt =
      app.add_option("--t-end", t_end, "Simulated duration in seconds")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sensor noise");
  app.add_option("--out", o.out, "Directory for CSV traces and JSON reports");
  app.add_option("--parallel", o.parallel, "Number of worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> files;
  auto* simulate = app.add_subcommand("simulate", "Run scenario files");
  simulate->add_option("scenario", files, "Scenario file(s)")->required();

  std::vector<std::string> names;
  auto* preset_cmd = app.add_subcommand("preset", "Run built-in presets");
  preset_cmd->add_option("name", names, "Preset name(s)")->required();

  std::vector<std::string> reports;
  auto* compare_cmd = app.add_subcommand("compare", "Tabulate JSON run reports");
  compare_cmd->add_option("records", reports, "Report files written by --out")->required();

  std::string validate_file;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and its gains");
  validate_cmd->add_option("scenario", validate_file, "Scenario file")->required();

  auto* list_cmd = app.add_subcommand("list-presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  if (*dt_opt) o.dt = dt;
  if (*t_end_opt) o.t_end = t_end;
  if (*seed_opt) o.seed = seed;

  try {
    if (*list_cmd) {
      for (const auto& s : presets()) std::printf("%-28s %s\n", s.name.c_str(), s.description.c_str());
      return kOk;
    }
    if (*simulate) {
      std::vector<Scenario> scenarios;
      for (const auto& f : files) scenarios.push_back(load_scenario(f));
      return run_all(std::move(scenarios), o);
    }
    if (*preset_cmd) {
      std::vector<Scenario> scenarios;
      for (const auto& n : names) scenarios.push_back(preset(n));
      return run_all(std::move(scenarios), o);
    }
    if (*compare_cmd) {
      std::vector<Summary> rows;
      for (const auto& f : reports) rows.push_back(summary_from_report(read_file(f)));
      std::cout << compare(rows);
      return kOk;
    }
    if (*validate_cmd) {
      Scenario s = load_scenario(validate_file);
      o.apply(s);
      const auto checks = validate(s);
      std::cout << "scenario '" << s.name << "' is runnable\n";
      for (const auto& report : checks) {
        for (const auto& c : report.checks) {
          std::printf("  [%s] %s: %s (margin %.4g)%s%s\n", c.pass ? "ok  " : "warn",
                      report.validator.c_str(), c.name.c_str(), c.margin,
                      c.detail.empty() ? "" : ", ", c.detail.c_str());
        }
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kAborted;
  }
  return kOk;
}
