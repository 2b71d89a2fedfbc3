#include "maglev/presets.hpp"

namespace maglev::harness {
namespace {

Scenario base(std::string name, std::string description, ControllerKind controller) {
  Scenario s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.controller = controller;
  return s;
}

// Disturbance on the velocity and current channels in plant coordinates. A
// unit disturbance on dp itself is a velocity offset that no PI surface can
// cancel, so the presets leave that channel at zero.
plant::DisturbanceSpec plant_disturbance(plant::DisturbanceKind kind) {
  plant::DisturbanceSpec d;
  d.kind = kind;
  d.amplitude = {0.0, 1.0, 1.0};
  d.frequency = 1.0;
  return d;
}

// Unit sinusoid on the matched channel of the Brunovsky model, sampled and
// held at the input interval, i.e. the D = Gamma disturbance of the
// discrete designs.
plant::DisturbanceSpec matched_sampled(double tau) {
  plant::DisturbanceSpec d;
  d.kind = plant::DisturbanceKind::sinusoid;
  d.frame = plant::DisturbanceFrame::transformed;
  d.amplitude = {0.0, 0.0, 1.0};
  d.frequency = 1.0;
  d.hold = tau;
  return d;
}

Scenario dsmc_base(std::string name, std::string description, double t_end) {
  Scenario s = base(std::move(name), std::move(description), ControllerKind::dsmc);
  s.dt = 1e-3;
  s.t_end = t_end;
  return s;
}

Scenario mrof_base(std::string name, std::string description, double q, double t_end) {
  Scenario s = base(std::move(name), std::move(description), ControllerKind::mrof_dsmc);
  s.dt = 1e-3;
  s.t_end = t_end;
  s.mrof.q = q;
  s.mrof.output_scale = 1000.0;
  return s;
}

std::vector<Scenario> build() {
  std::vector<Scenario> out;

  out.push_back(base("fig3-regulation", "PI-SMC regulation to 0.01 m, nominal mass",
                     ControllerKind::pi_smc));
  {
    auto s = base("fig3-mass-plus30", "PI-SMC regulation with the ball mass raised by 30%",
                  ControllerKind::pi_smc);
    s.mass_factor = 1.3;
    out.push_back(s);
  }
  {
    auto s = base("fig3g-square-tracking", "PI-SMC tracking 0.01 m +/- 0.005 m square wave, 1 Hz",
                  ControllerKind::pi_smc);
    s.reference = {plant::ReferenceKind::square, 0.005, 1.0};
    out.push_back(s);
  }
  {
    auto s = base("fig3h-sine-tracking", "PI-SMC tracking 0.01 + 0.005 sin(2 pi t) m",
                  ControllerKind::pi_smc);
    s.reference = {plant::ReferenceKind::sine, 0.005, 1.0};
    out.push_back(s);
  }
  {
    auto s = base("fig4a-const-disturbance-FL",
                  "Feedback-linearization baseline under constant disturbance (0, 1, 1)",
                  ControllerKind::fl_baseline);
    s.disturbance = plant_disturbance(plant::DisturbanceKind::constant);
    out.push_back(s);
  }
  {
    auto s = base("fig4b-const-disturbance", "PI-SMC under constant disturbance (0, 1, 1)",
                  ControllerKind::pi_smc);
    s.disturbance = plant_disturbance(plant::DisturbanceKind::constant);
    s.pi_bounds = plant::disturbance_bound(s.disturbance);
    out.push_back(s);
  }
  {
    auto s = base("fig4c-sine-disturbance-FL",
                  "Feedback-linearization baseline under sin(2 pi t) on channels 2 and 3",
                  ControllerKind::fl_baseline);
    s.disturbance = plant_disturbance(plant::DisturbanceKind::sinusoid);
    out.push_back(s);
  }
  {
    auto s = base("fig4d-sine-disturbance", "PI-SMC under sin(2 pi t) on channels 2 and 3",
                  ControllerKind::pi_smc);
    s.disturbance = plant_disturbance(plant::DisturbanceKind::sinusoid);
    s.pi_bounds = plant::disturbance_bound(s.disturbance);
    out.push_back(s);
  }
  out.push_back(dsmc_base("fig5-dsmc", "State-feedback discrete SMC, tau = 0.1 s", 30.0));
  out.push_back(mrof_base("fig6-mrof-q3", "Multirate output-feedback DSMC, q = 3", 3.0, 30.0));
  out.push_back(mrof_base("fig6-mrof-q2", "Multirate output-feedback DSMC, q = 2", 2.0, 30.0));

  {
    auto s = base("table3-pi-smc", "PI-SMC under sin(2 pi t) on channels 2 and 3, 20 s",
                  ControllerKind::pi_smc);
    s.disturbance = plant_disturbance(plant::DisturbanceKind::sinusoid);
    s.pi_bounds = plant::disturbance_bound(s.disturbance);
    s.t_end = 20.0;
    out.push_back(s);
  }
  {
    auto s = dsmc_base("table3-dsmc", "DSMC under a sampled matched sinusoid, 20 s", 20.0);
    s.disturbance = matched_sampled(s.dsmc.tau);
    out.push_back(s);
  }
  {
    auto s = mrof_base("table3-mrof", "MROF-DSMC under a sampled matched sinusoid, 20 s", 3.0,
                       20.0);
    s.disturbance = matched_sampled(s.mrof.tau);
    out.push_back(s);
  }
  return out;
}

}  // namespace

const std::vector<Scenario>& presets() {
  static const std::vector<Scenario> table = build();
  return table;
}

Scenario preset(std::string_view name) {
  for (const auto& s : presets()) {
    if (s.name == name) return s;
  }
  throw ScenarioError("unknown preset '" + std::string(name) + "'; see list-presets");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& s : presets()) names.push_back(s.name);
  return names;
}

}  // namespace maglev::harness
