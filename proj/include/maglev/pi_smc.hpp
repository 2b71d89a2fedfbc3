#pragma once

#include <span>
#include <vector>

#include "maglev/linearization.hpp"
#include "maglev/model.hpp"
#include "maglev/numerics.hpp"
#include "maglev/plant.hpp"
#include "maglev/report.hpp"

namespace maglev::pi_smc {

struct PiSmcGains {
  numerics::RowVector k;  // pole-placement gain, 1 x 3
  Vec3 m{1200.0, 70.0, 1.0};
  double k4 = 0.1;
  double k5 = 5.0;
  double k0 = 6.0;
  double alpha_pow = 0.5;
  double eta = 1.0;

  // K placed at the given poles on the Brunovsky pair.
  static PiSmcGains from_poles(std::span<const numerics::Complex> poles);
  // Poles -30, -40, -50 with the reaching-law gains used in the evaluation.
  static PiSmcGains reference_design();

  // Row M^T (A + B K), the integrand weight of the surface.
  numerics::RowVector integrand_row() const;
};

struct PiSmcState {
  double accumulator = 0.0;
  double last_integrand = 0.0;
  double last_s = 0.0;
  bool started = false;
};

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// s = M^T z - accumulator.
double surface(const PiSmcGains& gains, const PiSmcState& state,
               const linearization::TransformedState& z);

// Trapezoidal update of the accumulator with integrand M^T (A + B K) z. The
// first call only latches the integrand, so the integral is 0 at t = 0.
void advance(const PiSmcGains& gains, PiSmcState& state,
             const linearization::TransformedState& z, double dt);

// w = K z - (k4 s + k5 sgn s + k0 |s|^alpha sgn s) / m3.
double control_w(const PiSmcGains& gains, double s, const linearization::TransformedState& z);

// Roots of m3 s^2 + m2 s + m1, the dynamics of z1 on the surface.
std::vector<numerics::Complex> sliding_polynomial_roots(const Vec3& m);

// Gain conditions of the stability theorem. `bounds` are D1, D2, D3.
ValidationReport validate_gains(const PiSmcGains& gains, const Vec3& bounds);

// Closed-loop PI-SMC: the voltage is computed at every call and held until the
// next one. `period` must equal the hold interval used by the integrator.
class Controller {
 public:
  Controller(const PlantParams& params, PiSmcGains gains, plant::ReferenceSpec reference,
             double period);

  plant::ControlUpdate operator()(const PlantState& x);

 private:
  PlantParams params_;
  PiSmcGains gains_;
  plant::ReferenceSpec reference_;
  double period_;
  PiSmcState state_;
};

// Feedback-linearization baseline w = K z with the same outer loop, voltage
// held over the call period.
class FlBaselineController {
 public:
  FlBaselineController(const PlantParams& params, numerics::RowVector k,
                       plant::ReferenceSpec reference);

  plant::ControlUpdate operator()(const PlantState& x) const;

 private:
  PlantParams params_;
  numerics::RowVector k_;
  plant::ReferenceSpec reference_;
};

}  // namespace maglev::pi_smc
