#pragma once

#include <vector>

#include "maglev/linearization.hpp"
#include "maglev/model.hpp"
#include "maglev/numerics.hpp"
#include "maglev/plant.hpp"

namespace maglev::discrete {

struct DiscreteLTI {
  numerics::Matrix phi;
  numerics::Matrix gamma;
  numerics::Matrix c;
  numerics::Matrix d;  // disturbance input matrix
  double tau = 0.0;
};

// ZOH model of the Brunovsky chain at interval tau with matched disturbance
// input, D = Gamma.
DiscreteLTI discretize(const linearization::BrunovskyModel& model, double tau);

// Same, with the disturbance entering continuous time through direction `e`
// (n x q); D = (int_0^tau e^{As} ds) e.
DiscreteLTI discretize(const linearization::BrunovskyModel& model, double tau,
                       const numerics::Matrix& e);

struct MeanSpread {
  double mean = 0.0;
  double spread = 0.0;
};

// Mean and half-range of a bound pair. Throws if lower > upper.
MeanSpread mean_spread(double lower, double upper);

// Second-order Taylor step of the nonlinear Brunovsky dynamics over tau with
// input voltage u held. The jerk term uses a central-difference gradient of
// alpha + beta u along the flow. For model checks only; closed loops always
// integrate the nonlinear plant.
Vec3 taylor_discrete_step(const PlantParams& params, const linearization::TransformedState& z,
                          double u, double tau);

// Scalar disturbance sequence d(k) sampled at interval tau, with declared
// bounds. Construction fails if the declared bounds do not contain the
// signal's range.
class SampledDisturbance {
 public:
  SampledDisturbance() = default;
  SampledDisturbance(plant::DisturbanceKind kind, double amplitude, double frequency, double tau,
                     double lower, double upper);
  // Custom samples: value k is used at step k, the last one is held.
  SampledDisturbance(std::vector<double> samples, double lower, double upper);

  double at(long k) const;
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  MeanSpread bounds() const { return mean_spread(lower_, upper_); }

 private:
  plant::DisturbanceKind kind_ = plant::DisturbanceKind::none;
  double amplitude_ = 0.0;
  double frequency_ = 1.0;
  double tau_ = 1.0;
  std::vector<double> samples_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

// Input law that applies inner command w through the linearizing outer loop,
// evaluated at whatever state the integrator presents.
plant::InputLaw linearizing_law(const PlantParams& params, double w, double setpoint);

}  // namespace maglev::discrete
