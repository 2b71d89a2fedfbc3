#include "maglev/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maglev::discrete {

using linearization::TransformedState;

DiscreteLTI discretize(const linearization::BrunovskyModel& model, double tau) {
  return discretize(model, tau, model.b);
}

DiscreteLTI discretize(const linearization::BrunovskyModel& model, double tau,
                       const numerics::Matrix& e) {
  const auto zoh = numerics::expm_zoh(model.a, model.b, tau);
  DiscreteLTI sys;
  sys.phi = zoh.phi;
  sys.gamma = zoh.gamma;
  sys.c = model.c;
  const bool matched = e.rows() == model.b.rows() && e.cols() == model.b.cols() && e == model.b;
  sys.d = matched ? zoh.gamma : numerics::expm_zoh(model.a, e, tau).gamma;
  sys.tau = tau;
  return sys;
}

MeanSpread mean_spread(double lower, double upper) {
  if (!(lower <= upper)) throw std::invalid_argument("mean_spread: lower bound exceeds upper");
  return {0.5 * (lower + upper), 0.5 * (upper - lower)};
}

Vec3 taylor_discrete_step(const PlantParams& params, const TransformedState& z, double u,
                          double tau) {
  auto theta = [&](const TransformedState& at) {
    const auto ab = linearization::alpha_beta(params, at);
    return ab.alpha + ab.beta * u;
  };
  const double th = theta(z);

  constexpr double h = 1e-6;
  const Vec3 flow{z.z2, z.z3, th};
  double directional = 0.0;
  for (int j = 0; j < 3; ++j) {
    TransformedState plus = z;
    TransformedState minus = z;
    double* p = j == 0 ? &plus.z1 : (j == 1 ? &plus.z2 : &plus.z3);
    double* m = j == 0 ? &minus.z1 : (j == 1 ? &minus.z2 : &minus.z3);
    *p += h;
    *m -= h;
    directional += (theta(plus) - theta(minus)) / (2.0 * h) * flow[j];
  }

  const double half_sq = 0.5 * tau * tau;
  return {z.z1 + tau * z.z2 + half_sq * z.z3, z.z2 + tau * z.z3 + half_sq * th,
          z.z3 + tau * th + half_sq * directional};
}

SampledDisturbance::SampledDisturbance(plant::DisturbanceKind kind, double amplitude,
                                       double frequency, double tau, double lower, double upper)
    : kind_(kind), amplitude_(amplitude), frequency_(frequency), tau_(tau), lower_(lower),
      upper_(upper) {
  if (kind == plant::DisturbanceKind::samples) {
    throw std::invalid_argument("use the sample-list constructor for custom samples");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("sampled disturbance needs tau > 0");
  mean_spread(lower, upper);
  double lo = 0.0;
  double hi = 0.0;
  if (kind == plant::DisturbanceKind::constant) {
    lo = hi = amplitude;
  } else if (kind == plant::DisturbanceKind::sinusoid) {
    lo = -std::abs(amplitude);
    hi = std::abs(amplitude);
  }
  if (lo < lower || hi > upper) {
    throw std::invalid_argument("declared bounds do not contain the disturbance range");
  }
}

SampledDisturbance::SampledDisturbance(std::vector<double> samples, double lower, double upper)
    : kind_(plant::DisturbanceKind::samples), samples_(std::move(samples)), lower_(lower),
      upper_(upper) {
  mean_spread(lower, upper);
  if (samples_.empty()) throw std::invalid_argument("custom disturbance needs samples");
  const auto [lo, hi] = std::minmax_element(samples_.begin(), samples_.end());
  if (*lo < lower || *hi > upper) {
    throw std::invalid_argument("declared bounds do not contain the disturbance samples");
  }
}

double SampledDisturbance::at(long k) const {
  switch (kind_) {
    case plant::DisturbanceKind::none:
      return 0.0;
    case plant::DisturbanceKind::constant:
      return amplitude_;
    case plant::DisturbanceKind::sinusoid:
      return amplitude_ *
             std::sin(2.0 * std::numbers::pi * frequency_ * static_cast<double>(k) * tau_);
    case plant::DisturbanceKind::samples: {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(0L, k)),
                                             samples_.size() - 1);
      return samples_[idx];
    }
  }
  return 0.0;
}

plant::InputLaw linearizing_law(const PlantParams& params, double w, double setpoint) {
  return [params, w, setpoint](const PlantState& x) {
    const auto z = linearization::to_z(params, x, setpoint);
    return linearization::outer_loop_u(params, z, w, setpoint);
  };
}

}  // namespace maglev::discrete
