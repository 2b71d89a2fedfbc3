#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maglev/metrics.hpp"
#include "maglev/mrof.hpp"
#include "maglev/plant.hpp"
#include "maglev/report.hpp"
#include "maglev/scenario.hpp"

namespace maglev::harness {

struct RunRecord {
  Scenario scenario;
  plant::SimTrace trace;
  std::optional<metrics::MetricReport> metrics;  // absent only if the trace is empty
  std::vector<ValidationReport> validators;
  std::optional<mrof::Diagnostics> reconstruction;
  double wall_seconds = 0.0;
  // Set when the run could not start, e.g. an invalid scenario inside a batch.
  std::string error;

  bool aborted() const { return !error.empty() || trace.abort.has_value(); }
  std::vector<std::string> warnings() const;
};

// Gain and parameter validators for the scenario's controller. Failures are
// reported, not thrown; structural problems throw ScenarioError.
std::vector<ValidationReport> validate(const Scenario& scenario);

RunRecord run(const Scenario& scenario);

// Runs every scenario on up to `parallelism` threads. Records come back in
// input order; a failing scenario yields a record with `error` set.
std::vector<RunRecord> run_batch(std::span<const Scenario> scenarios, int parallelism);

// Compact per-run summary used by compare; can be rebuilt from a report file.
struct Summary {
  std::string name;
  std::string controller;
  double t_final = 0.0;
  metrics::MetricReport metrics;
  bool aborted = false;
};

Summary summarize(const RunRecord& record);
Summary summary_from_report(const std::string& json_text);

// Fixed-width table with IAE, ITAE, t_s, e_dmax and chatter columns.
std::string compare(std::span<const Summary> rows);

std::string trace_csv(const plant::SimTrace& trace);
std::string report_json(const RunRecord& record);

// Writes <name>.csv, <name>.json and <name>.scenario into `dir`, creating it.
void write_outputs(const RunRecord& record, const std::string& dir);

}  // namespace maglev::harness
