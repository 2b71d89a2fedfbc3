#include "maglev/linearization.hpp"

#include <cmath>
#include <string>

namespace maglev::linearization {

numerics::Vector TransformedState::eigen() const {
  numerics::Vector v(3);
  v << z1, z2, z3;
  return v;
}

BrunovskyModel BrunovskyModel::standard() {
  BrunovskyModel model;
  model.a = numerics::Matrix::Zero(3, 3);
  model.a(0, 1) = 1.0;
  model.a(1, 2) = 1.0;
  model.b = numerics::Matrix::Zero(3, 1);
  model.b(2, 0) = 1.0;
  model.c = numerics::Matrix::Zero(1, 3);
  model.c(0, 0) = 1.0;
  return model;
}

LossOfAuthorityError::LossOfAuthorityError(double beta)
    : std::domain_error("input gain beta = " + std::to_string(beta) +
                        " is below the authority threshold"),
      beta_(beta) {}

TransformedState to_z(const PlantParams& params, const PlantState& x, double setpoint) {
  if (!(x.p > 0.0)) throw SingularPositionError(x.p, x.t);
  const double ratio = x.i / x.p;
  return {x.p - setpoint, x.v,
          params.gravity - (params.force_constant / params.mass) * ratio * ratio, x.t};
}

PlantState from_z(const PlantParams& params, const TransformedState& z, double setpoint) {
  const double headroom = params.gravity - z.z3;
  if (headroom < 0.0) throw std::domain_error("z3 above g has no real current");
  const double p = z.z1 + setpoint;
  if (!(p > 0.0)) throw SingularPositionError(p, z.t);
  return {p, z.z2, p * std::sqrt(headroom * params.mass / params.force_constant), z.t};
}

AlphaBeta alpha_beta(const PlantParams& params, const TransformedState& z, double setpoint) {
  const double headroom = params.gravity - z.z3;
  if (headroom < 0.0) throw std::domain_error("z3 above g has no real current");
  const double p = z.z1 + setpoint;
  if (p < kMinPosition) throw SingularPositionError(p, z.t);
  const double q = params.force_constant;
  const double inductance = params.inductance_at(p);
  AlphaBeta out;
  out.alpha = 2.0 * headroom *
              ((1.0 - 2.0 * q / (inductance * p)) * (z.z2 / p) + params.resistance / inductance);
  out.beta = -(2.0 / (inductance * p)) * std::sqrt((q / params.mass) * headroom);
  return out;
}

double outer_loop_u(const PlantParams& params, const TransformedState& z, double w,
                    double setpoint) {
  const auto ab = alpha_beta(params, z, setpoint);
  if (std::abs(ab.beta) < kBetaMin) throw LossOfAuthorityError(ab.beta);
  return (-ab.alpha + w) / ab.beta;
}

double fl_baseline_w(const numerics::RowVector& k, const TransformedState& z) {
  return k(0) * z.z1 + k(1) * z.z2 + k(2) * z.z3;
}

}  // namespace maglev::linearization
