#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace maglev::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Complex = std::complex<double>;

inline constexpr double kStabilityTol = 1e-9;
inline constexpr double kConjugateTol = 1e-12;

struct ZohPair {
  Matrix phi;
  Matrix gamma;
};

struct PolePlacementResult {
  RowVector gain;
  std::vector<Complex> achieved;  // sorted by real part, then imaginary part
};

// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

// Matrix exponential by scaling and squaring of a truncated Taylor series.
Matrix expm(const Matrix& a);

// Zero-order-hold discretization: phi = e^{A tau}, gamma = (int_0^tau e^{As} ds) B.
// Both come from one exponential of the augmented block [[A, B], [0, 0]] tau,
// which stays valid when A is singular.
ZohPair expm_zoh(const Matrix& a, const Matrix& b, double tau);

// Single-input pole placement by Ackermann's formula, for the convention
// u = K x (closed loop A + B K).
PolePlacementResult place_poles(const Matrix& a, const Matrix& b,
                                std::span<const Complex> poles);

// Monic characteristic polynomial coefficients, highest power first.
std::vector<double> characteristic_polynomial(const Matrix& a);

// Monic polynomial with the given roots, highest power first. Roots must be
// closed under conjugation.
std::vector<double> poly_from_roots(std::span<const Complex> roots);

// Roots of a polynomial given highest power first. Degree <= 3 uses closed
// forms; higher degrees use the companion matrix.
std::vector<Complex> polynomial_roots(std::span<const double> coeffs);

// All n eigenvalues with multiplicity, sorted by real part then imaginary part.
std::vector<Complex> eigenvalues(const Matrix& a);

void sort_complex(std::vector<Complex>& values);

double spectral_radius(const Matrix& a);
bool is_hurwitz(const Matrix& a, double tol = kStabilityTol);
bool is_schur(const Matrix& a, double tol = kStabilityTol);

// Largest distance between matched elements of two equal-sized multisets of
// complex numbers (greedy nearest matching). Infinity if the sizes differ.
double multiset_distance(std::span<const Complex> lhs, std::span<const Complex> rhs);

}  // namespace maglev::numerics
