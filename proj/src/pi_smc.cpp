#include "maglev/pi_smc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maglev::pi_smc {

using linearization::TransformedState;

PiSmcGains PiSmcGains::from_poles(std::span<const numerics::Complex> poles) {
  const auto model = linearization::BrunovskyModel::standard();
  PiSmcGains gains;
  gains.k = numerics::place_poles(model.a, model.b, poles).gain;
  return gains;
}

PiSmcGains PiSmcGains::reference_design() {
  const std::array<numerics::Complex, 3> poles{-30.0, -40.0, -50.0};
  return from_poles(poles);
}

numerics::RowVector PiSmcGains::integrand_row() const {
  const auto model = linearization::BrunovskyModel::standard();
  numerics::RowVector mt(3);
  mt << m[0], m[1], m[2];
  return mt * (model.a + model.b * k);
}

double surface(const PiSmcGains& gains, const PiSmcState& state, const TransformedState& z) {
  return gains.m[0] * z.z1 + gains.m[1] * z.z2 + gains.m[2] * z.z3 - state.accumulator;
}

void advance(const PiSmcGains& gains, PiSmcState& state, const TransformedState& z, double dt) {
  const numerics::RowVector row = gains.integrand_row();
  const double integrand = row(0) * z.z1 + row(1) * z.z2 + row(2) * z.z3;
  if (state.started) {
    state.accumulator += 0.5 * dt * (state.last_integrand + integrand);
  } else {
    state.accumulator = 0.0;
    state.started = true;
  }
  state.last_integrand = integrand;
}

double control_w(const PiSmcGains& gains, double s, const TransformedState& z) {
  const double sign = sgn(s);
  const double reaching =
      gains.k4 * s + gains.k5 * sign + gains.k0 * std::pow(std::abs(s), gains.alpha_pow) * sign;
  return linearization::fl_baseline_w(gains.k, z) - reaching / gains.m[2];
}

std::vector<numerics::Complex> sliding_polynomial_roots(const Vec3& m) {
  if (m[2] == 0.0) throw std::invalid_argument("sliding polynomial needs m3 != 0");
  const std::array<double, 3> coeffs{m[2], m[1], m[0]};
  return numerics::polynomial_roots(coeffs);
}

ValidationReport validate_gains(const PiSmcGains& gains, const Vec3& bounds) {
  ValidationReport report;
  report.validator = "pi_smc.gain_conditions";
  report.add("k4 > 0", gains.k4 > 0.0, gains.k4);
  report.add("k5 > 0", gains.k5 > 0.0, gains.k5);
  report.add("k0 > 0", gains.k0 > 0.0, gains.k0);
  const double alpha_margin = std::min(gains.alpha_pow, 1.0 - gains.alpha_pow);
  report.add("0 < alpha < 1", alpha_margin > 0.0, alpha_margin);
  report.add("m3 != 0", gains.m[2] != 0.0, std::abs(gains.m[2]));
  report.add("eta > 0", gains.eta > 0.0, gains.eta);

  const auto model = linearization::BrunovskyModel::standard();
  const auto closed = numerics::eigenvalues(model.a + model.b * gains.k);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& lambda : closed) worst = std::max(worst, lambda.real());
  report.add("A + BK Hurwitz", worst < -numerics::kStabilityTol, -worst);

  if (gains.m[2] != 0.0) {
    double sliding_worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : sliding_polynomial_roots(gains.m)) {
      sliding_worst = std::max(sliding_worst, r.real());
    }
    report.add("sliding polynomial Hurwitz", sliding_worst < -numerics::kStabilityTol,
               -sliding_worst);
  }

  double required = gains.eta;
  for (int j = 0; j < 3; ++j) {
    if (bounds[j] < 0.0) throw std::invalid_argument("disturbance bounds must be >= 0");
    required += std::abs(gains.m[j]) * bounds[j];
  }
  const bool robust = gains.k5 >= required;
  report.add("k5 >= m.D + eta", robust, gains.k5 - required,
             robust ? std::string{}
                    : "reduced-robustness regime: k5 = " + std::to_string(gains.k5) +
                          " < " + std::to_string(required));
  return report;
}

Controller::Controller(const PlantParams& params, PiSmcGains gains,
                       plant::ReferenceSpec reference, double period)
    : params_(params), gains_(std::move(gains)), reference_(reference), period_(period) {}

plant::ControlUpdate Controller::operator()(const PlantState& x) {
  const double x1d = reference_.at(params_.setpoint, x.t);
  const auto z = linearization::to_z(params_, x, x1d);
  advance(gains_, state_, z, period_);
  const double s = surface(gains_, state_, z);
  state_.last_s = s;
  const double w = control_w(gains_, s, z);
  const double u = linearization::outer_loop_u(params_, z, w, x1d);
  plant::ControlUpdate update;
  update.law = plant::hold_voltage(u);
  update.w = w;
  update.s = s;
  return update;
}

FlBaselineController::FlBaselineController(const PlantParams& params, numerics::RowVector k,
                                           plant::ReferenceSpec reference)
    : params_(params), k_(std::move(k)), reference_(reference) {}

plant::ControlUpdate FlBaselineController::operator()(const PlantState& x) const {
  const double x1d = reference_.at(params_.setpoint, x.t);
  const auto z = linearization::to_z(params_, x, x1d);
  const double w = linearization::fl_baseline_w(k_, z);
  plant::ControlUpdate update;
  update.law = plant::hold_voltage(linearization::outer_loop_u(params_, z, w, x1d));
  update.w = w;
  return update;
}

}  // namespace maglev::pi_smc
