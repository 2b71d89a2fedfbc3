#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "maglev/dsmc.hpp"
#include "maglev/metrics.hpp"
#include "maglev/model.hpp"
#include "maglev/mrof.hpp"
#include "maglev/numerics.hpp"
#include "maglev/pi_smc.hpp"
#include "maglev/plant.hpp"

namespace maglev::harness {

enum class ControllerKind { pi_smc, fl_baseline, dsmc, mrof_dsmc };

std::string_view to_string(ControllerKind kind);
ControllerKind parse_controller(std::string_view text);

// Raised for malformed scenario files and for scenarios that cannot run as
// configured. The CLI maps it to exit code 1.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Scenario {
  std::string name = "scenario";
  std::string description;
  ControllerKind controller = ControllerKind::pi_smc;

  // Parameters the controllers are designed with. The simulated plant uses the
  // same values with the mass multiplied by mass_factor.
  PlantParams params;
  double mass_factor = 1.0;

  PlantState initial{0.015, 0.0, 0.35, 0.0};
  plant::ReferenceSpec reference;
  plant::DisturbanceSpec disturbance;

  double dt = 1e-4;
  double t_end = 5.0;
  unsigned long long seed = 0;

  // PI-SMC and the feedback-linearization baseline share the pole-placement
  // gain; an explicit k overrides the poles.
  Vec3 poles{-30.0, -40.0, -50.0};
  std::optional<Vec3> k;
  pi_smc::PiSmcGains pi;
  // Disturbance bounds D1..D3 the PI-SMC gains are checked against; the
  // nominal design assumes none.
  Vec3 pi_bounds{0.0, 0.0, 0.0};
  // Hold interval of the continuous-time controllers; 0 means every step.
  double control_period = 0.0;

  dsmc::DsmcGains dsmc;
  mrof::MrofConfig mrof;

  metrics::WindowSpec window;

  PlantParams simulated_params() const;
  // Pole-placement gain resolved from k or poles.
  numerics::RowVector feedback_gain() const;
  // Controller call interval in integration steps.
  int hold_steps() const;

  // Throws ScenarioError when the scenario cannot be run.
  void validate() const;
};

// Flat "key = value" format, one entry per line, '#' starts a comment.
// Vectors are comma separated. Unknown keys are errors.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string write_scenario(const Scenario& scenario);

// Sets one key; shared by the parser and CLI overrides.
void set_field(Scenario& scenario, std::string_view key, std::string_view value);

}  // namespace maglev::harness
