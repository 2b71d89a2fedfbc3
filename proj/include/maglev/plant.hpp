#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "maglev/model.hpp"

namespace maglev::plant {

// State derivative (dp, dv, di) of the levitation model with input voltage u
// and additive disturbance d in original coordinates.
Vec3 dynamics(const PlantParams& params, const PlantState& state, double u, const Vec3& d);

// Rest equilibrium at params.setpoint: (x1d, 0, x1d sqrt(g m / Q)).
PlantState equilibrium(const PlantParams& params);

// Voltage that holds the equilibrium, R i_d.
double equilibrium_voltage(const PlantParams& params);

enum class DisturbanceKind { none, constant, sinusoid, samples };

// The frame a disturbance is declared in. Transformed-frame values act on
// (z1, z2, z3) and are mapped to plant coordinates through the Jacobian of T.
enum class DisturbanceFrame { original, transformed };

struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::none;
  Vec3 amplitude{0.0, 0.0, 0.0};
  double frequency = 1.0;  // Hz, sinusoid only
  DisturbanceFrame frame = DisturbanceFrame::original;
  // When positive, the signal is sampled at multiples of this interval and held.
  double hold = 0.0;
  // Custom samples: value k applies on [sample_times[k], sample_times[k+1]).
  std::vector<double> sample_times;
  std::vector<double> sample_values;

  // Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

// Per-channel value at time t, in the spec's own frame.
Vec3 disturbance_value(const DisturbanceSpec& spec, double t);

// Componentwise bound max_t |d_j(t)| of the spec, in its own frame.
Vec3 disturbance_bound(const DisturbanceSpec& spec);

// Maps a transformed-frame disturbance (acting on z-dot) to the additive
// disturbance on x-dot that produces it.
Vec3 to_original_frame(const PlantParams& params, const PlantState& x, const Vec3& dz);

enum class ReferenceKind { constant, square, sine };

// Position setpoint x1d(t) = base + offset(t).
struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::constant;
  double amplitude = 0.0;  // m
  double frequency = 1.0;  // Hz

  double at(double base, double t) const;
};

// Voltage as a function of the plant state, valid until the next hold boundary.
using InputLaw = std::function<double(const PlantState&)>;

struct ControlUpdate {
  InputLaw law;
  double w = std::numeric_limits<double>::quiet_NaN();
  double s = std::numeric_limits<double>::quiet_NaN();
  double s_tilde = std::numeric_limits<double>::quiet_NaN();
  // False when the controller only carried its previous command over, e.g.
  // an output-sampling call between input updates. Such calls add no event.
  bool boundary = true;
};

// Invoked at every hold boundary with the current state (t set).
using ControlCallback = std::function<ControlUpdate(const PlantState&)>;

struct ControlEvent {
  double t = 0.0;
  double w = 0.0;
  double s = 0.0;
  double s_tilde = 0.0;
};

struct SimAbort {
  // control_fault: the controller or input law rejected the state, e.g. loss
  // of control authority at zero current.
  enum class Reason { singular_position, non_finite, control_fault };
  Reason reason = Reason::singular_position;
  double t = 0.0;
  std::string message;
};

struct SimTrace {
  std::vector<double> t;
  std::vector<PlantState> states;
  std::vector<Vec3> z;             // Brunovsky coordinates against setpoint(t)
  std::vector<double> setpoint;
  std::vector<double> u;
  std::vector<double> s;           // last surface value reported by the controller
  std::vector<double> s_tilde;
  std::vector<ControlEvent> events;  // one per hold boundary
  std::optional<SimAbort> abort;

  std::size_t size() const { return t.size(); }
  bool completed() const { return !abort.has_value(); }
};

struct IntegrateOptions {
  double dt = 1e-4;
  double t_end = 5.0;
  int hold_steps = 1;  // controller period in integration steps
  ReferenceSpec reference;
};

// Classical RK4 with the controller called every hold_steps steps. The input
// law returned by the controller is evaluated inside every RK stage. A
// singular position or non-finite state ends the run early; the trace keeps
// every sample up to that point and records why in `abort`.
SimTrace integrate(const PlantParams& params, const PlantState& initial,
                   const ControlCallback& controller, const DisturbanceSpec& disturbance,
                   const IntegrateOptions& options);

// Constant-voltage input law.
InputLaw hold_voltage(double u);

}  // namespace maglev::plant
