#pragma once

#include <stdexcept>

#include "maglev/model.hpp"
#include "maglev/numerics.hpp"

namespace maglev::linearization {

inline constexpr double kBetaMin = 1e-3;

struct TransformedState {
  double z1 = 0.0;  // position error, m
  double z2 = 0.0;  // velocity, m/s
  double z3 = 0.0;  // g minus specific magnetic force, m/s^2
  double t = 0.0;

  Vec3 vec() const { return {z1, z2, z3}; }
  numerics::Vector eigen() const;
};

// Chain of three integrators: A shift matrix, B = e3, C = e1^T.
struct BrunovskyModel {
  numerics::Matrix a;
  numerics::Matrix b;
  numerics::Matrix c;

  static BrunovskyModel standard();
};

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

class LossOfAuthorityError : public std::domain_error {
 public:
  explicit LossOfAuthorityError(double beta);
  double beta() const { return beta_; }

 private:
  double beta_;
};

TransformedState to_z(const PlantParams& params, const PlantState& x, double setpoint);
inline TransformedState to_z(const PlantParams& params, const PlantState& x) {
  return to_z(params, x, params.setpoint);
}

// Inverse of to_z on the branch i >= 0. Throws std::domain_error if z3 > g.
PlantState from_z(const PlantParams& params, const TransformedState& z, double setpoint);
inline PlantState from_z(const PlantParams& params, const TransformedState& z) {
  return from_z(params, z, params.setpoint);
}

// z3-dot = alpha + beta u along the undisturbed dynamics.
AlphaBeta alpha_beta(const PlantParams& params, const TransformedState& z, double setpoint);
inline AlphaBeta alpha_beta(const PlantParams& params, const TransformedState& z) {
  return alpha_beta(params, z, params.setpoint);
}

// u = (w - alpha)/beta. Throws LossOfAuthorityError when |beta| < kBetaMin.
double outer_loop_u(const PlantParams& params, const TransformedState& z, double w,
                    double setpoint);
inline double outer_loop_u(const PlantParams& params, const TransformedState& z, double w) {
  return outer_loop_u(params, z, w, params.setpoint);
}

// Feedback-linearization baseline inner loop, w = K z.
double fl_baseline_w(const numerics::RowVector& k, const TransformedState& z);

}  // namespace maglev::linearization
