#pragma once

#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "maglev/discrete.hpp"
#include "maglev/model.hpp"
#include "maglev/numerics.hpp"
#include "maglev/plant.hpp"
#include "maglev/report.hpp"

namespace maglev::mrof {

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;

  discrete::MeanSpread mean_spread() const { return discrete::mean_spread(lower, upper); }
};

struct MrofConfig {
  double tau = 0.06;  // input interval
  double rho = 0.02;  // output interval
  int n = 3;          // outputs per input interval
  double q = 3.0;
  double eps = 1.0;
  Vec3 m{0.66, 1.0, 0.12};
  Bounds d{-0.008, 0.014};      // matched disturbance through D
  Bounds r{-0.002, 0.013};      // mismatched uncertainty entering the reaching law
  Bounds noise{-0.009, 0.015};  // per-component bounds of n(k) = Ld d(k)
  // Length unit of the controller's own coordinates relative to metres. The
  // controller works on scale * z and emits scale * w.
  double output_scale = 1.0;
  double sensor_noise_std = 0.0;  // in controller units
  std::optional<double> sigma_s;  // reaching-condition slack; midpoint of the window if unset

  // Throws std::invalid_argument on structural problems: tau != n rho, n < 3,
  // q <= 0, eps < 0, 1 - q tau <= 0, inverted bounds, output_scale <= 0.
  void validate() const;
};

struct MrofGains {
  numerics::Matrix c0;   // N x n
  numerics::Matrix d0;   // N x 1
  numerics::Matrix dy;   // N x q
  numerics::Matrix lw;   // n x 1
  numerics::Matrix ly;   // n x N
  numerics::Matrix ld;   // n x q
  numerics::RowVector fy;
  double fw = 0.0;
  double gm = 0.0;
  double gs = 0.0;
  double input_gain = 0.0;  // M^T Gamma_tau
  numerics::RowVector m;
  numerics::Matrix phi_tau;
};

// y_k holds the N outputs sampled over the previous input interval,
// y((k-1) tau + j rho) for j = 0..N-1, oldest first.
struct OutputStack {
  numerics::Vector y;
  std::vector<double> times;
  double w_prev = 0.0;
  long k = 0;
  bool full = false;
};

MrofGains build_gains(const MrofConfig& cfg, const discrete::DiscreteLTI& sys_tau,
                      const discrete::DiscreteLTI& sys_rho);

// Convenience: discretizes the Brunovsky chain at tau and rho first.
MrofGains build_gains(const MrofConfig& cfg);

// z_hat = Lw w(k-1) + Ly y_k, plus Ld d(k-1) when the disturbance is known.
numerics::Vector reconstruct_state(const MrofGains& gains, const OutputStack& stack,
                                   const std::optional<numerics::Vector>& d_prev = std::nullopt);

// s~ = M^T Lw w(k-1) + M^T Ly y_k + M^T n_m, with n_m the box-centre vector.
double surface_tilde(const MrofConfig& cfg, const MrofGains& gains, const OutputStack& stack);

// w(k) = Fy y_k + Fw w(k-1) - Gm - Gs sgn(s~).
double control(const MrofConfig& cfg, const MrofGains& gains, const OutputStack& stack);

struct BandBound {
  double xi = 0.0;
  double constraint1_lhs = 0.0;  // q tau^2 eps / (2 (1 - q tau)), must exceed d_s + r_s
  bool constraint1_ok = false;
  double constraint2_lhs = 0.0;  // 2 (d_s + r_s) + eps tau, must exceed 2 n_s
  bool constraint2_ok = false;
};

BandBound qsm_band_bound(const MrofConfig& cfg);

struct GainConditionTerms {
  double theta_m = 0.0, theta_s = 0.0;
  double gamma_m = 0.0, gamma_s = 0.0;
  double p_m = 0.0, p_s = 0.0;
  double sigma_s = 0.0;
  double xi = 0.0;
};

GainConditionTerms gain_condition_terms(const MrofConfig& cfg, const MrofGains& gains);

ValidationReport validate_gain_conditions(const MrofConfig& cfg, const MrofGains& gains);

struct Diagnostics {
  double max_reconstruction_error = 0.0;  // controller units, k >= 1
  long steps = 0;
  double latest_sample_lag = 0.0;  // min over k of (k tau - newest stack time)
};

// MROF-DSMC on the nonlinear plant. Call once per output interval rho. Every
// N-th call starts a new input interval: w(k) is computed from the stack of
// the previous interval and applied through the linearizing outer loop.
class Controller {
 public:
  Controller(const PlantParams& params, MrofConfig cfg, unsigned long long seed);

  plant::ControlUpdate operator()(const PlantState& x);

  const MrofGains& gains() const { return gains_; }
  const Diagnostics& diagnostics() const { return diag_; }

 private:
  PlantParams params_;
  MrofConfig cfg_;
  MrofGains gains_;
  OutputStack stack_;
  std::vector<double> pending_y_;
  std::vector<double> pending_t_;
  long sample_ = 0;
  double w_ = 0.0;
  double s_ = 0.0;
  double s_tilde_ = 0.0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
  Diagnostics diag_;
};

}  // namespace maglev::mrof
