#include "maglev/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "maglev/linearization.hpp"

namespace maglev {

void PlantParams::validate() const {
  const double values[] = {resistance, inductance, gravity,        mass,    permeability,
                           pole_area,  turns,      force_constant, setpoint};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("plant parameters must be finite and strictly positive");
    }
  }
  const double derived = derived_force_constant();
  if (std::abs(derived - force_constant) > 0.05 * force_constant) {
    throw std::invalid_argument("force constant Q = " + std::to_string(force_constant) +
                                " disagrees with mu0 A N^2 / 4 = " + std::to_string(derived));
  }
}

}  // namespace maglev

namespace maglev::plant {

Vec3 dynamics(const PlantParams& params, const PlantState& state, double u, const Vec3& d) {
  const double p = state.p;
  if (!(p > kMinPosition)) throw SingularPositionError(p, state.t);
  const double q = params.force_constant;
  const double ratio = state.i / p;
  const double inductance = params.inductance_at(p);
  return {
      state.v + d[0],
      params.gravity - (q / params.mass) * ratio * ratio + d[1],
      (-params.resistance * state.i + 2.0 * q * state.v * state.i / (p * p)) / inductance +
          u / inductance + d[2],
  };
}

PlantState equilibrium(const PlantParams& params) {
  const double x1d = params.setpoint;
  return {x1d, 0.0, x1d * std::sqrt(params.gravity * params.mass / params.force_constant), 0.0};
}

double equilibrium_voltage(const PlantParams& params) {
  return params.resistance * equilibrium(params).i;
}

void DisturbanceSpec::validate() const {
  for (double a : amplitude) {
    if (!std::isfinite(a)) throw std::invalid_argument("disturbance amplitude must be finite");
  }
  if (kind == DisturbanceKind::sinusoid && !(frequency > 0.0 && std::isfinite(frequency))) {
    throw std::invalid_argument("sinusoidal disturbance needs a positive frequency");
  }
  if (!(hold >= 0.0) || !std::isfinite(hold)) {
    throw std::invalid_argument("disturbance hold interval must be >= 0");
  }
  if (kind == DisturbanceKind::samples) {
    if (sample_times.empty() || sample_times.size() != sample_values.size()) {
      throw std::invalid_argument("custom disturbance needs equally many times and values");
    }
    if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
      throw std::invalid_argument("custom disturbance sample times must be nondecreasing");
    }
    for (double v : sample_values) {
      if (!std::isfinite(v)) throw std::invalid_argument("custom disturbance value not finite");
    }
  }
}

Vec3 disturbance_value(const DisturbanceSpec& spec, double t) {
  if (spec.hold > 0.0) t = std::floor(t / spec.hold + 1e-9) * spec.hold;
  double shape = 0.0;
  switch (spec.kind) {
    case DisturbanceKind::none:
      return {0.0, 0.0, 0.0};
    case DisturbanceKind::constant:
      shape = 1.0;
      break;
    case DisturbanceKind::sinusoid:
      shape = std::sin(2.0 * std::numbers::pi * spec.frequency * t);
      break;
    case DisturbanceKind::samples: {
      const auto it = std::upper_bound(spec.sample_times.begin(), spec.sample_times.end(), t);
      if (it == spec.sample_times.begin()) return {0.0, 0.0, 0.0};
      shape = spec.sample_values[static_cast<std::size_t>(it - spec.sample_times.begin()) - 1];
      break;
    }
  }
  return {spec.amplitude[0] * shape, spec.amplitude[1] * shape, spec.amplitude[2] * shape};
}

Vec3 disturbance_bound(const DisturbanceSpec& spec) {
  double shape = 0.0;
  switch (spec.kind) {
    case DisturbanceKind::none:
      return {0.0, 0.0, 0.0};
    case DisturbanceKind::constant:
    case DisturbanceKind::sinusoid:
      shape = 1.0;
      break;
    case DisturbanceKind::samples:
      for (double v : spec.sample_values) shape = std::max(shape, std::abs(v));
      break;
  }
  return {std::abs(spec.amplitude[0]) * shape, std::abs(spec.amplitude[1]) * shape,
          std::abs(spec.amplitude[2]) * shape};
}

Vec3 to_original_frame(const PlantParams& params, const PlantState& x, const Vec3& dz) {
  // z = (p - x1d, v, g - (Q/m) i^2/p^2); only the z3 row couples channels.
  const double k = params.force_constant / params.mass;
  const double dz3_dp = 2.0 * k * x.i * x.i / (x.p * x.p * x.p);
  const double dz3_di = -2.0 * k * x.i / (x.p * x.p);
  if (std::abs(dz3_di) < 1e-12) {
    throw std::domain_error("transformed-frame disturbance needs nonzero current");
  }
  return {dz[0], dz[1], (dz[2] - dz3_dp * dz[0]) / dz3_di};
}

double ReferenceSpec::at(double base, double t) const {
  switch (kind) {
    case ReferenceKind::constant:
      return base;
    case ReferenceKind::square: {
      const double phase = frequency * t - std::floor(frequency * t);
      return base + (phase < 0.5 ? amplitude : -amplitude);
    }
    case ReferenceKind::sine:
      return base + amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
  }
  return base;
}

InputLaw hold_voltage(double u) {
  return [u](const PlantState&) { return u; };
}

namespace {

PlantState add_scaled(const PlantState& x, const Vec3& k, double h) {
  return {x.p + h * k[0], x.v + h * k[1], x.i + h * k[2], x.t};
}

bool finite_state(const PlantState& x) {
  return std::isfinite(x.p) && std::isfinite(x.v) && std::isfinite(x.i);
}

}  // namespace

SimTrace integrate(const PlantParams& params, const PlantState& initial,
                   const ControlCallback& controller, const DisturbanceSpec& disturbance,
                   const IntegrateOptions& options) {
  const double dt = options.dt;
  if (!(dt > 0.0) || !(options.t_end > 0.0) || options.hold_steps < 1) {
    throw std::invalid_argument("integrate: need dt > 0, t_end > 0 and hold_steps >= 1");
  }
  if (dt * options.hold_steps > options.t_end + dt) {
    throw std::invalid_argument("integrate: hold interval longer than the run");
  }
  disturbance.validate();
  const auto steps = static_cast<long>(std::llround(options.t_end / dt));

  SimTrace trace;
  const auto capacity = static_cast<std::size_t>(steps + 1);
  trace.t.reserve(capacity);
  trace.states.reserve(capacity);
  trace.z.reserve(capacity);
  trace.setpoint.reserve(capacity);
  trace.u.reserve(capacity);
  trace.s.reserve(capacity);
  trace.s_tilde.reserve(capacity);

  const bool held = disturbance.hold > 0.0;
  const bool transformed = disturbance.frame == DisturbanceFrame::transformed;
  auto disturbance_at = [&](const PlantState& x, double t) -> Vec3 {
    const Vec3 d = disturbance_value(disturbance, t);
    if (!transformed || disturbance.kind == DisturbanceKind::none) return d;
    return to_original_frame(params, x, d);
  };

  PlantState x = initial;
  const double t0 = initial.t;
  ControlUpdate current;

  auto fail = [&](SimAbort::Reason reason, double t, const std::string& what) {
    trace.abort = SimAbort{reason, t, what};
  };

  for (long step = 0; step <= steps; ++step) {
    const double t = t0 + static_cast<double>(step) * dt;
    x.t = t;
    try {
      if (step % options.hold_steps == 0) {
        current = controller(x);
        if (current.boundary) trace.events.push_back({t, current.w, current.s, current.s_tilde});
      }
      const double x1d = options.reference.at(params.setpoint, t);
      const auto z = linearization::to_z(params, x, x1d);
      const double u = current.law(x);
      trace.t.push_back(t);
      trace.states.push_back(x);
      trace.z.push_back(z.vec());
      trace.setpoint.push_back(x1d);
      trace.u.push_back(u);
      trace.s.push_back(current.s);
      trace.s_tilde.push_back(current.s_tilde);
    } catch (const SingularPositionError& e) {
      fail(SimAbort::Reason::singular_position, t, e.what());
      break;
    } catch (const std::domain_error& e) {
      fail(SimAbort::Reason::control_fault, t, e.what());
      break;
    }
    if (step == steps) break;

    const double t_hold = t;
    auto rhs = [&](const PlantState& xs, double ts) {
      const Vec3 d = disturbance_at(xs, held ? t_hold : ts);
      return dynamics(params, xs, current.law(xs), d);
    };
    try {
      PlantState stage = x;
      stage.t = t;
      const Vec3 k1 = rhs(stage, t);
      stage = add_scaled(x, k1, 0.5 * dt);
      stage.t = t + 0.5 * dt;
      const Vec3 k2 = rhs(stage, t + 0.5 * dt);
      stage = add_scaled(x, k2, 0.5 * dt);
      stage.t = t + 0.5 * dt;
      const Vec3 k3 = rhs(stage, t + 0.5 * dt);
      stage = add_scaled(x, k3, dt);
      stage.t = t + dt;
      const Vec3 k4 = rhs(stage, t + dt);
      PlantState next = x;
      next.p += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      next.v += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
      next.i += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
      if (!finite_state(next)) {
        fail(SimAbort::Reason::non_finite, t + dt, "state became non-finite");
        break;
      }
      if (!(next.p > kMinPosition)) {
        fail(SimAbort::Reason::singular_position, t + dt,
             SingularPositionError(next.p, t + dt).what());
        break;
      }
      x = next;
    } catch (const SingularPositionError& e) {
      fail(SimAbort::Reason::singular_position, e.time(), e.what());
      break;
    } catch (const std::domain_error& e) {
      fail(SimAbort::Reason::control_fault, t, e.what());
      break;
    }
  }
  return trace;
}

}  // namespace maglev::plant
