#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace maglev {

using Vec3 = std::array<double, 3>;

// Below this position the 1/p^2 force term makes the model meaningless.
inline constexpr double kMinPosition = 1e-4;

struct PlantParams {
  double resistance = 28.7;            // R, ohm
  double inductance = 0.65;            // L1, H
  double gravity = 9.81;               // g_c, m/s^2
  double mass = 11.87e-3;              // m, kg
  double permeability = 2.125e-7;      // mu0 as tabulated, H/m
  double pole_area = 8.0e-4 * 3.14159265358979323846;  // A, m^2
  double turns = 1024.0;               // N
  double force_constant = 1.4e-4;      // Q
  double setpoint = 0.01;              // x1d, m

  // Coil inductance at ball position p: L1 + 2Q/p.
  double inductance_at(double p) const { return inductance + 2.0 * force_constant / p; }

  // Q recomputed from the magnetic circuit, mu0 A N^2 / 4.
  double derived_force_constant() const {
    return permeability * pole_area * turns * turns / 4.0;
  }

  // Throws std::invalid_argument on a non-positive constant or when the stored
  // Q disagrees with the magnetic-circuit value by more than 5%.
  void validate() const;
};

struct PlantState {
  double p = 0.0;  // ball position, m
  double v = 0.0;  // ball velocity, m/s
  double i = 0.0;  // coil current, A
  double t = 0.0;  // s
};

class SingularPositionError : public std::domain_error {
 public:
  SingularPositionError(double position, double time)
      : std::domain_error("ball position " + std::to_string(position) +
                          " m is at or below the singularity guard at t = " +
                          std::to_string(time) + " s"),
        position_(position),
        time_(time) {}

  double position() const { return position_; }
  double time() const { return time_; }

 private:
  double position_;
  double time_;
};

}  // namespace maglev
