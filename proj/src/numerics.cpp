#include "maglev/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace maglev::numerics {
namespace {

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
}

template <typename T>
T horner(std::span<const double> coeffs, T x) {
  T acc{0.0};
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

template <typename T>
T horner_derivative(std::span<const double> coeffs, T x) {
  const auto degree = coeffs.size() - 1;
  T acc{0.0};
  for (std::size_t k = 0; k < degree; ++k) {
    acc = acc * x + coeffs[k] * static_cast<double>(degree - k);
  }
  return acc;
}

// A few Newton steps on the original polynomial. Cardano and the trigonometric
// form lose a few digits on clustered roots; a step is kept only if it lowers
// the residual.
template <typename T>
T polish(std::span<const double> coeffs, T x) {
  for (int iter = 0; iter < 4; ++iter) {
    const T f = horner(coeffs, x);
    const T df = horner_derivative(coeffs, x);
    if (std::abs(f) == 0.0 || std::abs(df) < 1e-300) break;
    const T next = x - f / df;
    if (!(std::abs(horner(coeffs, next)) < std::abs(f))) break;
    x = next;
  }
  return x;
}

// Roots of x^2 + b x + c.
std::vector<Complex> monic_quadratic_roots(double b, double c) {
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0) return {Complex{0.0}, Complex{0.0}};
    return {Complex{q}, Complex{c / q}};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {Complex{-0.5 * b, -im}, Complex{-0.5 * b, im}};
}

// Roots of x^3 + a x^2 + b x + c.
std::vector<Complex> monic_cubic_roots(double a, double b, double c) {
  const std::array<double, 4> coeffs{1.0, a, b, c};
  const double a3 = a / 3.0;
  const double p = b - a * a3;
  const double q = 2.0 * a3 * a3 * a3 - a3 * b + c;
  if (p == 0.0 && q == 0.0) return {Complex{-a3}, Complex{-a3}, Complex{-a3}};

  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    const double big = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
    const double small = big == 0.0 ? 0.0 : -p / (3.0 * big);
    const double r = polish<double>(coeffs, big + small - a3);
    auto rest = monic_quadratic_roots(a + r, b + (a + r) * r);
    return {Complex{r}, rest[0], rest[1]};
  }
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  std::vector<Complex> roots;
  for (int k = 0; k < 3; ++k) {
    const double t = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    roots.emplace_back(polish<double>(coeffs, t - a3));
  }
  return roots;
}

std::vector<Complex> general_eigenvalues(const Matrix& a) {
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: QR iteration did not converge");
  }
  std::vector<Complex> out;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    out.push_back(solver.eigenvalues()[k]);
  }
  return out;
}

void require_conjugate_closed(std::span<const Complex> values) {
  std::vector<bool> used(values.size(), false);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double scale = std::max(1.0, std::abs(values[k]));
    if (used[k] || std::abs(values[k].imag()) <= kConjugateTol * scale) continue;
    bool matched = false;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j == k || used[j]) continue;
      if (std::abs(values[j] - std::conj(values[k])) <= kConjugateTol * scale) {
        used[j] = used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) throw std::invalid_argument("pole set is not closed under conjugation");
  }
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

Matrix expm(const Matrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  const int squarings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  const auto n = a.rows();
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <=
        std::numeric_limits<double>::epsilon() * result.cwiseAbs().maxCoeff()) {
      break;
    }
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

ZohPair expm_zoh(const Matrix& a, const Matrix& b, double tau) {
  require_square(a, "expm_zoh");
  if (b.rows() != a.rows() || b.cols() == 0) {
    throw std::invalid_argument("expm_zoh: B must have as many rows as A");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("expm_zoh: tau must be > 0");
  require_finite(a, "expm_zoh");
  require_finite(b, "expm_zoh");

  const auto n = a.rows();
  const auto m = b.cols();
  Matrix augmented = Matrix::Zero(n + m, n + m);
  augmented.topLeftCorner(n, n) = a * tau;
  augmented.topRightCorner(n, m) = b * tau;
  const Matrix e = expm(augmented);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

std::vector<double> poly_from_roots(std::span<const Complex> roots) {
  require_conjugate_closed(roots);
  std::vector<Complex> poly{Complex{1.0}};
  for (const Complex& r : roots) {
    std::vector<Complex> next(poly.size() + 1, Complex{0.0});
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k] += poly[k];
      next[k + 1] -= poly[k] * r;
    }
    poly = std::move(next);
  }
  std::vector<double> out;
  for (const Complex& c : poly) out.push_back(c.real());
  return out;
}

std::vector<double> characteristic_polynomial(const Matrix& a) {
  require_square(a, "characteristic_polynomial");
  const auto n = a.rows();
  if (n == 1) return {1.0, -a(0, 0)};
  if (n == 2) return {1.0, -a.trace(), a.determinant()};
  if (n == 3) {
    const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) -
                          a(0, 2) * a(2, 0) + a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    return {1.0, -a.trace(), minors, -a.determinant()};
  }
  const auto roots = general_eigenvalues(a);
  return poly_from_roots(roots);
}

std::vector<Complex> polynomial_roots(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs.front() == 0.0) {
    throw std::invalid_argument("polynomial_roots: leading coefficient must be nonzero");
  }
  const double lead = coeffs.front();
  std::vector<double> monic;
  for (double c : coeffs) monic.push_back(c / lead);
  const auto degree = monic.size() - 1;

  std::vector<Complex> roots;
  switch (degree) {
    case 0:
      break;
    case 1:
      roots = {Complex{-monic[1]}};
      break;
    case 2:
      roots = monic_quadratic_roots(monic[1], monic[2]);
      break;
    case 3:
      roots = monic_cubic_roots(monic[1], monic[2], monic[3]);
      break;
    default: {
      const auto n = static_cast<Eigen::Index>(degree);
      Matrix companion = Matrix::Zero(n, n);
      for (Eigen::Index k = 0; k < n; ++k) companion(0, k) = -monic[k + 1];
      for (Eigen::Index k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
      roots = general_eigenvalues(companion);
    }
  }
  sort_complex(roots);
  return roots;
}

std::vector<Complex> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  require_finite(a, "eigenvalues");
  if (a.rows() <= 3) {
    const auto poly = characteristic_polynomial(a);
    return polynomial_roots(poly);
  }
  auto roots = general_eigenvalues(a);
  sort_complex(roots);
  return roots;
}

void sort_complex(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

PolePlacementResult place_poles(const Matrix& a, const Matrix& b, std::span<const Complex> poles) {
  require_square(a, "place_poles");
  require_finite(a, "place_poles");
  require_finite(b, "place_poles");
  const auto n = a.rows();
  if (b.rows() != n || b.cols() != 1) throw std::invalid_argument("place_poles: B must be n x 1");
  if (static_cast<Eigen::Index>(poles.size()) != n) {
    throw std::invalid_argument("place_poles: need exactly n poles");
  }
  const auto coeffs = poly_from_roots(poles);

  Matrix ctrb(n, n);
  ctrb.col(0) = b;
  for (Eigen::Index k = 1; k < n; ++k) ctrb.col(k) = a * ctrb.col(k - 1);
  Eigen::FullPivLU<Matrix> lu(ctrb);
  lu.setThreshold(1e-12);
  if (lu.rank() < n) throw std::invalid_argument("place_poles: (A, B) is not controllable");

  Matrix phi_a = Matrix::Zero(n, n);
  for (double c : coeffs) phi_a = phi_a * a + c * Matrix::Identity(n, n);

  const Vector last_row = ctrb.transpose().fullPivLu().solve(Vector::Unit(n, n - 1));
  PolePlacementResult result;
  result.gain = -(last_row.transpose() * phi_a);
  result.achieved = eigenvalues(a + b * result.gain);
  return result;
}

double spectral_radius(const Matrix& a) {
  double radius = 0.0;
  for (const Complex& lambda : eigenvalues(a)) radius = std::max(radius, std::abs(lambda));
  return radius;
}

bool is_hurwitz(const Matrix& a, double tol) {
  const auto values = eigenvalues(a);
  return std::all_of(values.begin(), values.end(),
                     [tol](const Complex& lambda) { return lambda.real() < -tol; });
}

bool is_schur(const Matrix& a, double tol) { return spectral_radius(a) < 1.0 - tol; }

double multiset_distance(std::span<const Complex> lhs, std::span<const Complex> rhs) {
  if (lhs.size() != rhs.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(rhs.size(), false);
  double worst = 0.0;
  for (const Complex& x : lhs) {
    std::size_t best = rhs.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - rhs[j]);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

}  // namespace maglev::numerics
