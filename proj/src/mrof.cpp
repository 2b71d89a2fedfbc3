#include "maglev/mrof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maglev/pi_smc.hpp"

namespace maglev::mrof {
namespace {

using numerics::Matrix;
using numerics::RowVector;
using numerics::Vector;

RowVector row(const Vec3& m) {
  RowVector r(3);
  r << m[0], m[1], m[2];
  return r;
}

void require_full(const OutputStack& stack, const MrofGains& gains) {
  if (!stack.full || stack.y.size() != gains.ly.cols()) {
    throw std::logic_error("output stack is not filled for this step");
  }
}

// M^T n_m for a box whose every component has centre n_m.
double noise_offset(const MrofConfig& cfg) {
  return cfg.noise.mean_spread().mean * (cfg.m[0] + cfg.m[1] + cfg.m[2]);
}

}  // namespace

void MrofConfig::validate() const {
  if (n < 3) throw std::invalid_argument("mrof: N must be at least the observability index 3");
  if (!(rho > 0.0) || std::abs(tau - n * rho) > 1e-9 * tau) {
    throw std::invalid_argument("mrof: need tau = N rho with rho > 0");
  }
  if (!(q > 0.0)) throw std::invalid_argument("mrof: q must be > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("mrof: eps must be >= 0");
  if (!(1.0 - q * tau > 0.0)) throw std::invalid_argument("mrof: need 1 - q tau > 0");
  if (!(output_scale > 0.0)) throw std::invalid_argument("mrof: output_scale must be > 0");
  if (!(sensor_noise_std >= 0.0)) throw std::invalid_argument("mrof: noise std must be >= 0");
  d.mean_spread();
  r.mean_spread();
  noise.mean_spread();
}

MrofGains build_gains(const MrofConfig& cfg, const discrete::DiscreteLTI& sys_tau,
                      const discrete::DiscreteLTI& sys_rho) {
  cfg.validate();
  const auto n = sys_tau.phi.rows();
  const auto outputs = sys_tau.c.rows();
  const auto big_n = static_cast<Eigen::Index>(cfg.n);
  const auto q = sys_rho.d.cols();

  MrofGains g;
  g.c0 = Matrix::Zero(outputs * big_n, n);
  g.d0 = Matrix::Zero(outputs * big_n, sys_rho.gamma.cols());
  g.dy = Matrix::Zero(outputs * big_n, q);
  Matrix phi_power = Matrix::Identity(n, n);
  Matrix gamma_sum = Matrix::Zero(n, sys_rho.gamma.cols());
  Matrix d_sum = Matrix::Zero(n, q);
  for (Eigen::Index j = 0; j < big_n; ++j) {
    g.c0.middleRows(j * outputs, outputs) = sys_rho.c * phi_power;
    g.d0.middleRows(j * outputs, outputs) = sys_rho.c * gamma_sum;
    g.dy.middleRows(j * outputs, outputs) = sys_rho.c * d_sum;
    gamma_sum += phi_power * sys_rho.gamma;
    d_sum += phi_power * sys_rho.d;
    phi_power = phi_power * sys_rho.phi;
  }

  Eigen::FullPivLU<Matrix> lu(g.c0);
  lu.setThreshold(1e-12);
  if (lu.rank() < n) throw std::domain_error("mrof: stacked output map C0 is rank deficient");

  // (C0^T C0)^{-1} C0^T through a QR least-squares solve; forming the normal
  // matrix would square the condition number of C0.
  const Matrix pinv =
      g.c0.colPivHouseholderQr().solve(Matrix::Identity(g.c0.rows(), g.c0.rows()));
  g.ly = sys_tau.phi * pinv;
  g.lw = sys_tau.gamma - sys_tau.phi * pinv * g.d0;
  g.ld = sys_tau.d - sys_tau.phi * pinv * g.dy;

  g.m = row(cfg.m);
  g.phi_tau = sys_tau.phi;
  g.input_gain = (g.m * sys_tau.gamma)(0, 0);
  if (std::abs(g.input_gain) < 1e-12) throw std::domain_error("mrof: M^T Gamma is singular");
  const RowVector reach = g.m * sys_tau.phi - g.m + cfg.q * cfg.tau * g.m;
  g.fy = -(reach * g.ly) / g.input_gain;
  g.fw = -(reach * g.lw)(0, 0) / g.input_gain;

  const auto d = cfg.d.mean_spread();
  const auto r = cfg.r.mean_spread();
  g.gm = (d.mean + r.mean) / g.input_gain;
  g.gs = (d.spread + r.spread + cfg.eps * cfg.tau) / g.input_gain;
  return g;
}

MrofGains build_gains(const MrofConfig& cfg) {
  const auto model = linearization::BrunovskyModel::standard();
  return build_gains(cfg, discrete::discretize(model, cfg.tau), discrete::discretize(model, cfg.rho));
}

Vector reconstruct_state(const MrofGains& gains, const OutputStack& stack,
                         const std::optional<Vector>& d_prev) {
  require_full(stack, gains);
  Vector z = gains.lw.col(0) * stack.w_prev + gains.ly * stack.y;
  if (d_prev) z += gains.ld * (*d_prev);
  return z;
}

double surface_tilde(const MrofConfig& cfg, const MrofGains& gains, const OutputStack& stack) {
  require_full(stack, gains);
  return (gains.m * gains.lw)(0, 0) * stack.w_prev + (gains.m * gains.ly).dot(stack.y) +
         noise_offset(cfg);
}

double control(const MrofConfig& cfg, const MrofGains& gains, const OutputStack& stack) {
  const double s_tilde = surface_tilde(cfg, gains, stack);
  return gains.fy.dot(stack.y) + gains.fw * stack.w_prev - gains.gm -
         gains.gs * pi_smc::sgn(s_tilde);
}

BandBound qsm_band_bound(const MrofConfig& cfg) {
  const double ds = cfg.d.mean_spread().spread;
  const double rs = cfg.r.mean_spread().spread;
  const double ns = cfg.noise.mean_spread().spread;
  const double one_minus = 1.0 - cfg.q * cfg.tau;
  BandBound out;
  out.xi = (2.0 * (ds + rs) + ns + cfg.eps * cfg.tau) / one_minus;
  out.constraint1_lhs = cfg.q * cfg.tau * cfg.tau * cfg.eps / (2.0 * one_minus);
  out.constraint1_ok = out.constraint1_lhs > ds + rs;
  out.constraint2_lhs = 2.0 * (ds + rs) + cfg.eps * cfg.tau;
  out.constraint2_ok = out.constraint2_lhs > 2.0 * ns;
  return out;
}

GainConditionTerms gain_condition_terms(const MrofConfig& cfg, const MrofGains& gains) {
  const auto d = cfg.d.mean_spread();
  const auto r = cfg.r.mean_spread();
  const auto nb = cfg.noise.mean_spread();
  const RowVector m_phi = gains.m * gains.phi_tau;

  GainConditionTerms t;
  t.theta_m = nb.mean * m_phi.sum();
  t.theta_s = nb.spread * m_phi.cwiseAbs().sum();
  t.gamma_m = nb.mean * gains.m.sum();
  t.gamma_s = nb.spread * gains.m.cwiseAbs().sum();
  t.p_m = d.mean + r.mean;
  t.p_s = d.spread + r.spread + cfg.eps * cfg.tau;
  t.xi = qsm_band_bound(cfg).xi;
  const double window_hi = t.p_s - t.theta_s - t.gamma_s - d.spread;
  if (cfg.sigma_s) {
    t.sigma_s = *cfg.sigma_s;
  } else if (window_hi > r.mean) {
    t.sigma_s = 0.5 * (r.mean + window_hi);
  } else {
    t.sigma_s = window_hi;
  }
  return t;
}

ValidationReport validate_gain_conditions(const MrofConfig& cfg, const MrofGains& gains) {
  const auto t = gain_condition_terms(cfg, gains);
  const auto band = qsm_band_bound(cfg);
  const auto d = cfg.d.mean_spread();
  const auto r = cfg.r.mean_spread();
  const auto nb = cfg.noise.mean_spread();

  ValidationReport report;
  report.validator = "mrof.gain_conditions";
  report.add("q tau^2 eps / (2 (1 - q tau)) > d_s + r_s", band.constraint1_ok,
             band.constraint1_lhs - (d.spread + r.spread),
             band.constraint1_ok ? std::string{} : "band constraint violated");
  report.add("2 (d_s + r_s) + eps tau > 2 n_s", band.constraint2_ok,
             band.constraint2_lhs - 2.0 * nb.spread);
  const double reach = t.p_s - (t.theta_s + t.gamma_s + d.spread + t.sigma_s);
  report.add("p_s >= theta_s + gamma_s + d_s + sigma_s", reach >= 0.0, reach);
  report.add("sigma_s > r_m", t.sigma_s > r.mean, t.sigma_s - r.mean);
  report.add("r_m >= 0", r.mean >= 0.0, r.mean);
  const double consistency = 2.0 * t.xi - (t.p_s + r.mean - (t.theta_s + t.gamma_s + d.spread));
  report.add("p_s + r_m - (theta_s + gamma_s + d_s) < 2 xi", consistency > 0.0, consistency);
  return report;
}

Controller::Controller(const PlantParams& params, MrofConfig cfg, unsigned long long seed)
    : params_(params),
      cfg_(std::move(cfg)),
      gains_(build_gains(cfg_)),
      rng_(seed),
      noise_(0.0, cfg_.sensor_noise_std > 0.0 ? cfg_.sensor_noise_std : 1.0) {
  diag_.latest_sample_lag = std::numeric_limits<double>::infinity();
}

plant::ControlUpdate Controller::operator()(const PlantState& x) {
  const double scale = cfg_.output_scale;
  const double x1d = params_.setpoint;
  plant::ControlUpdate update;
  update.boundary = sample_ % cfg_.n == 0;
  if (update.boundary) {
    const long k = sample_ / cfg_.n;
    const Vector z_true = scale * linearization::to_z(params_, x, x1d).eigen();
    s_ = gains_.m.dot(z_true);
    if (k == 0) {
      // Before any outputs exist, hold the equilibrium inner command.
      w_ = 0.0;
      s_tilde_ = std::numeric_limits<double>::quiet_NaN();
    } else {
      stack_.y = Eigen::Map<const Vector>(pending_y_.data(),
                                          static_cast<Eigen::Index>(pending_y_.size()));
      stack_.times = pending_t_;
      stack_.k = k;
      stack_.full = static_cast<int>(pending_y_.size()) == cfg_.n;
      const Vector z_hat = reconstruct_state(gains_, stack_);
      diag_.max_reconstruction_error =
          std::max(diag_.max_reconstruction_error, (z_hat - z_true).norm());
      diag_.latest_sample_lag = std::min(diag_.latest_sample_lag, x.t - stack_.times.back());
      diag_.steps = k;
      s_tilde_ = surface_tilde(cfg_, gains_, stack_);
      w_ = control(cfg_, gains_, stack_);
    }
    stack_.w_prev = w_;
    pending_y_.clear();
    pending_t_.clear();
  }

  double y = scale * (x.p - x1d);
  if (cfg_.sensor_noise_std > 0.0) y += noise_(rng_);
  pending_y_.push_back(y);
  pending_t_.push_back(x.t);
  ++sample_;

  update.law = discrete::linearizing_law(params_, w_ / scale, x1d);
  update.w = w_;
  update.s = s_;
  update.s_tilde = s_tilde_;
  return update;
}

}  // namespace maglev::mrof
