#include "maglev/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maglev/pi_smc.hpp"

namespace maglev::dsmc {
namespace {

using numerics::Matrix;
using numerics::RowVector;
using numerics::Vector;

RowVector row(const Vec3& m) {
  RowVector r(3);
  r << m[0], m[1], m[2];
  return r;
}

double input_gain(const discrete::DiscreteLTI& sys, const Vec3& m) {
  const double mg = (row(m) * sys.gamma)(0, 0);
  if (std::abs(mg) < 1e-12) throw std::domain_error("M^T Gamma is singular");
  return mg;
}

}  // namespace

void DsmcGains::validate() const {
  if (!(q > 0.0)) throw std::invalid_argument("dsmc: q must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("dsmc: eps must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("dsmc: tau must be > 0");
  if (!(1.0 - q * tau > 0.0)) throw std::invalid_argument("dsmc: need 1 - q tau > 0");
  if (!(d_s >= 0.0)) throw std::invalid_argument("dsmc: d_s must be >= 0");
}

double control(const DsmcGains& gains, const discrete::DiscreteLTI& sys, const Vector& z) {
  const double mg = input_gain(sys, gains.m);
  const RowVector mt = row(gains.m);
  const RowVector feedback = mt * sys.phi - mt + gains.q * gains.tau * mt;
  const double s = mt.dot(z);
  const double switching = (gains.d_s + gains.eps * gains.tau) * pi_smc::sgn(s);
  return -(feedback.dot(z) + gains.d_m + switching) / mg;
}

BandBound qsm_band_bound(const DsmcGains& gains) {
  BandBound out;
  out.xi = 2.0 * gains.d_s + gains.eps * gains.tau;
  out.constraint_lhs =
      gains.q * gains.tau * gains.tau * gains.eps / (2.0 * (1.0 - gains.q * gains.tau));
  out.constraint_ok = out.constraint_lhs > gains.d_s;
  return out;
}

ProjectedSurface design_surface_projected(const discrete::DiscreteLTI& sys, const Vec3& m) {
  const double mg = input_gain(sys, m);
  const auto n = sys.phi.rows();
  ProjectedSurface out;
  out.closed_loop = (Matrix::Identity(n, n) - sys.gamma * row(m) / mg) * sys.phi;
  out.eigenvalues = numerics::eigenvalues(out.closed_loop);

  // The projection annihilates Gamma's direction after Phi, so one eigenvalue
  // is zero by construction; drop the one nearest the origin.
  out.nontrivial = out.eigenvalues;
  const auto trivial = std::min_element(
      out.nontrivial.begin(), out.nontrivial.end(),
      [](const auto& a, const auto& b) { return std::abs(a) < std::abs(b); });
  const bool zero_present = std::abs(*trivial) <= 1e-6;
  out.nontrivial.erase(trivial);
  out.stable = zero_present &&
               std::all_of(out.nontrivial.begin(), out.nontrivial.end(), [](const auto& lambda) {
                 return std::abs(lambda) < 1.0 - numerics::kStabilityTol;
               });
  return out;
}

RegularForm design_surface_regular_form(const discrete::DiscreteLTI& sys, const Vec3& m) {
  if (sys.phi.rows() != 3 || sys.gamma.cols() != 1) {
    throw std::invalid_argument("regular form is implemented for the 3-state, 1-input case");
  }
  // Gram-Schmidt on {Gamma, e1, e2}; the two vectors orthogonal to Gamma
  // become the first columns and Gamma itself the last.
  const Vector g = sys.gamma.col(0);
  const Vector g_hat = g.normalized();
  Vector q1 = Vector::Unit(3, 0) - g_hat.dot(Vector::Unit(3, 0)) * g_hat;
  if (q1.norm() < 1e-9) throw std::domain_error("regular form: e1 parallel to Gamma");
  q1.normalize();
  Vector q2 = Vector::Unit(3, 1) - g_hat.dot(Vector::Unit(3, 1)) * g_hat - q1.dot(Vector::Unit(3, 1)) * q1;
  if (q2.norm() < 1e-9) throw std::domain_error("regular form: basis completion failed");
  q2.normalize();

  RegularForm rf;
  rf.omega = Matrix(3, 3);
  rf.omega.col(0) = q1;
  rf.omega.col(1) = q2;
  rf.omega.col(2) = g;
  const Matrix omega_inv = rf.omega.inverse();
  rf.phi_tilde = omega_inv * sys.phi * rf.omega;
  rf.phi11 = rf.phi_tilde.topLeftCorner(2, 2);
  rf.phi12 = rf.phi_tilde.topRightCorner(2, 1);
  rf.phi21 = rf.phi_tilde.bottomLeftCorner(1, 2);
  rf.phi22 = rf.phi_tilde.bottomRightCorner(1, 1);

  const RowVector m_tilde = row(m) * rf.omega;
  rf.m11 = m_tilde.head(2);
  rf.m12 = m_tilde(2);
  if (std::abs(rf.m12) < 1e-12) throw std::domain_error("regular form: M12 = 0");

  const Matrix sliding = rf.phi11 - rf.phi12 * rf.m11 / rf.m12;
  rf.psi11 = sliding;
  rf.psi12 = rf.phi12 / rf.m12;
  rf.psi21 = rf.m11 * rf.phi11 + rf.m12 * rf.phi21 -
             (rf.m11 * rf.phi12 + rf.m12 * rf.phi22) * rf.m11 / rf.m12;
  rf.psi22 = (rf.m11 * rf.phi12 + rf.m12 * rf.phi22) / rf.m12;
  rf.psi = Matrix(3, 3);
  rf.psi << rf.psi11, rf.psi12, rf.psi21, rf.psi22;

  rf.l_m = Matrix::Identity(3, 3);
  rf.l_m.row(2) = m_tilde;

  rf.eigenvalues = numerics::eigenvalues(sliding);
  rf.stable = std::all_of(rf.eigenvalues.begin(), rf.eigenvalues.end(), [](const auto& lambda) {
    return std::abs(lambda) < 1.0 - numerics::kStabilityTol;
  });
  return rf;
}

ValidationReport validate(const DsmcGains& gains, const discrete::DiscreteLTI& sys) {
  ValidationReport report;
  report.validator = "dsmc";
  report.add("q > 0", gains.q > 0.0, gains.q);
  report.add("eps > 0", gains.eps > 0.0, gains.eps);
  report.add("1 - q tau > 0", 1.0 - gains.q * gains.tau > 0.0, 1.0 - gains.q * gains.tau);
  const double mg = (row(gains.m) * sys.gamma)(0, 0);
  report.add("M^T Gamma != 0", std::abs(mg) > 1e-12, std::abs(mg));

  const auto band = qsm_band_bound(gains);
  report.add("q tau^2 eps / (2 (1 - q tau)) > d_s", band.constraint_ok,
             band.constraint_lhs - gains.d_s,
             band.constraint_ok ? std::string{}
                                : "band constraint violated; xi = " + std::to_string(band.xi) +
                                      " is not guaranteed");
  if (std::abs(mg) > 1e-12) {
    const auto projected = design_surface_projected(sys, gains.m);
    double radius = 0.0;
    for (const auto& lambda : projected.nontrivial) radius = std::max(radius, std::abs(lambda));
    report.add("sliding dynamics Schur", projected.stable, 1.0 - radius);
  }
  return report;
}

Controller::Controller(const PlantParams& params, DsmcGains gains)
    : params_(params),
      gains_(gains),
      sys_(discrete::discretize(linearization::BrunovskyModel::standard(), gains.tau)) {
  gains_.validate();
}

plant::ControlUpdate Controller::operator()(const PlantState& x) {
  const auto z = linearization::to_z(params_, x).eigen();
  const double w = control(gains_, sys_, z);
  plant::ControlUpdate update;
  update.law = discrete::linearizing_law(params_, w, params_.setpoint);
  update.w = w;
  update.s = row(gains_.m).dot(z);
  return update;
}

}  // namespace maglev::dsmc
