#pragma once

#include <vector>

#include "maglev/discrete.hpp"
#include "maglev/model.hpp"
#include "maglev/numerics.hpp"
#include "maglev/plant.hpp"
#include "maglev/report.hpp"

namespace maglev::dsmc {

struct DsmcGains {
  Vec3 m{60000.0, 4700.0, 120.0};
  double q = 0.4;
  double eps = 0.3;
  double tau = 0.1;
  double d_m = 0.002;
  double d_s = 0.003;

  // Throws std::invalid_argument unless q > 0, eps > 0, 1 - q tau > 0, tau > 0
  // and d_s >= 0.
  void validate() const;
};

// w = -(M^T Gamma)^{-1} [(M^T Phi - M^T + q tau M^T) z + d_m + (d_s + eps tau) sgn(M^T z)].
double control(const DsmcGains& gains, const discrete::DiscreteLTI& sys, const numerics::Vector& z);

struct BandBound {
  double xi = 0.0;               // 2 d_s + eps tau
  double constraint_lhs = 0.0;   // q tau^2 eps / (2 (1 - q tau))
  bool constraint_ok = false;    // constraint_lhs > d_s
};

BandBound qsm_band_bound(const DsmcGains& gains);

struct ProjectedSurface {
  numerics::Matrix closed_loop;                  // (I - Gamma (M^T Gamma)^{-1} M^T) Phi
  std::vector<numerics::Complex> eigenvalues;    // full spectrum
  std::vector<numerics::Complex> nontrivial;     // spectrum without the projection zero
  bool stable = false;
};

ProjectedSurface design_surface_projected(const discrete::DiscreteLTI& sys, const Vec3& m);

struct RegularForm {
  numerics::Matrix omega;       // z = Omega z~, Omega^{-1} Gamma = e3
  numerics::Matrix phi_tilde;   // Omega^{-1} Phi Omega
  numerics::Matrix phi11, phi12, phi21, phi22;
  numerics::RowVector m11;
  double m12 = 0.0;
  numerics::Matrix psi;         // assembled from the block formulas
  numerics::Matrix psi11, psi12, psi21, psi22;
  numerics::Matrix l_m;         // [[I, 0], [M11, M12]]
  std::vector<numerics::Complex> eigenvalues;  // of Phi11 - Phi12 M12^{-1} M11
  bool stable = false;
};

// Throws std::domain_error when M12 = M^T Gamma vanishes.
RegularForm design_surface_regular_form(const discrete::DiscreteLTI& sys, const Vec3& m);

// Parameter checks plus the band constraint (reported, may fail for
// published parameter sets) and the projected surface verdict.
ValidationReport validate(const DsmcGains& gains, const discrete::DiscreteLTI& sys);

// Full-state DSMC on the nonlinear plant: w(k) from z(k) = T(x(k tau)), applied
// through the linearizing outer loop until the next sample.
class Controller {
 public:
  Controller(const PlantParams& params, DsmcGains gains);

  plant::ControlUpdate operator()(const PlantState& x);
  const discrete::DiscreteLTI& system() const { return sys_; }

 private:
  PlantParams params_;
  DsmcGains gains_;
  discrete::DiscreteLTI sys_;
};

}  // namespace maglev::dsmc
