#pragma once

#include <array>
#include <complex>

namespace fsplay {

/// Row-major 2x2 real matrix.
struct Mat2 {
  double a = 0.0, b = 0.0;
  double c = 0.0, d = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  [[nodiscard]] double trace() const noexcept { return a + d; }
  [[nodiscard]] double det() const noexcept { return a * d - b * c; }
  [[nodiscard]] double max_abs() const noexcept;
};

using Vec2 = std::array<double, 2>;

[[nodiscard]] Mat2 operator*(const Mat2& m, const Mat2& n) noexcept;
[[nodiscard]] Mat2 operator*(double s, const Mat2& m) noexcept;
[[nodiscard]] Mat2 operator+(const Mat2& m, const Mat2& n) noexcept;
[[nodiscard]] Mat2 operator-(const Mat2& m, const Mat2& n) noexcept;
[[nodiscard]] Vec2 operator*(const Mat2& m, const Vec2& v) noexcept;

/// Scalar phi-functions: phi_0(z) = e^z, phi_k(z) = sum_j z^j / (j+k)!.
[[nodiscard]] std::complex<double> phi(int k, std::complex<double> z);

/// phi_k(A) for a 2x2 matrix, k >= 0.
///
/// Uses h(A) = c0 I + c1 (A - mu I) with mu = tr/2 and the eigenvalues
/// mu +- sqrt(mu^2 - det) (complex pairs allowed). When the eigenvalues
/// nearly coincide the coefficients come from a Taylor expansion about mu.
/// Throws NumericError on non-finite input or results.
[[nodiscard]] Mat2 phi_matrix(int k, const Mat2& A);

[[nodiscard]] inline Mat2 expm(const Mat2& A) { return phi_matrix(0, A); }

/// Solution at time s of z' = A z + b0 + s b1 with z(0) = z0:
/// e^{sA} z0 + s phi_1(sA) b0 + s^2 phi_2(sA) b1.
[[nodiscard]] Vec2 affine_flow(const Mat2& A, const Vec2& b0, const Vec2& b1, const Vec2& z0,
                               double s);

}  // namespace fsplay
