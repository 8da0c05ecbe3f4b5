#include "fsplay/linalg2.hpp"

#include <algorithm>
#include <cmath>

#include "fsplay/errors.hpp"

namespace fsplay {
namespace {

using cplx = std::complex<double>;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// n-th derivative of phi_k at real z:
//   phi_k^(n)(z) = sum_i C(n,i) (-1)^i (i+k-1)!/(k-1)! phi_{i+k}(z)  for k >= 1.
double phi_derivative(int k, int n, double z) {
  if (k == 0) return std::exp(z);
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    s += sign * binomial(n, i) * factorial(i + k - 1) / factorial(k - 1) * phi(i + k, z).real();
  }
  return s;
}

}  // namespace

double Mat2::max_abs() const noexcept {
  return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
}

Mat2 operator*(const Mat2& m, const Mat2& n) noexcept {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
          m.c * n.b + m.d * n.d};
}
Mat2 operator*(double s, const Mat2& m) noexcept { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
Mat2 operator+(const Mat2& m, const Mat2& n) noexcept {
  return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
}
Mat2 operator-(const Mat2& m, const Mat2& n) noexcept {
  return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
}
Vec2 operator*(const Mat2& m, const Vec2& v) noexcept {
  return {m.a * v[0] + m.b * v[1], m.c * v[0] + m.d * v[1]};
}

cplx phi(int k, cplx z) {
  if (k < 0) throw ArgumentError("phi: k must be >= 0");
  if (std::abs(z) <= 2.0) {
    // Power series; 40 terms are far past convergence for |z| <= 2.
    cplx term = 1.0 / factorial(k);
    cplx sum = term;
    for (int j = 1; j < 40; ++j) {
      term *= z / static_cast<double>(j + k);
      sum += term;
    }
    return sum;
  }
  cplx v = std::exp(z);
  for (int j = 1; j <= k; ++j) v = (v - 1.0 / factorial(j - 1)) / z;
  return v;
}

Mat2 phi_matrix(int k, const Mat2& A) {
  if (!std::isfinite(A.a) || !std::isfinite(A.b) || !std::isfinite(A.c) || !std::isfinite(A.d)) {
    throw NumericError("matrix function: non-finite matrix entry");
  }
  const double mu = 0.5 * A.trace();
  const double q = mu * mu - A.det();
  const Mat2 N = A - mu * Mat2::identity();
  const double scale = std::max(mu * mu, std::abs(A.det()));

  double c0 = 0.0;
  double c1 = 0.0;
  if (std::abs(q) <= 1e-8 * scale || std::sqrt(std::abs(q)) <= 1e-3) {
    // N^2 = q I, so h(mu + N) = sum_m h^(2m) q^m/(2m)! I + h^(2m+1) q^m/(2m+1)! N.
    c0 = phi_derivative(k, 0, mu) + phi_derivative(k, 2, mu) * q / 2.0 +
         phi_derivative(k, 4, mu) * q * q / 24.0;
    c1 = phi_derivative(k, 1, mu) + phi_derivative(k, 3, mu) * q / 6.0 +
         phi_derivative(k, 5, mu) * q * q / 120.0;
  } else {
    const cplx r = std::sqrt(cplx(q, 0.0));
    const cplx h1 = phi(k, mu + r);
    const cplx h2 = phi(k, mu - r);
    c0 = (0.5 * (h1 + h2)).real();
    c1 = ((h1 - h2) / (2.0 * r)).real();
  }
  const Mat2 out = c0 * Mat2::identity() + c1 * N;
  if (!std::isfinite(out.a) || !std::isfinite(out.b) || !std::isfinite(out.c) ||
      !std::isfinite(out.d)) {
    throw NumericError("matrix function: non-finite result");
  }
  return out;
}

Vec2 affine_flow(const Mat2& A, const Vec2& b0, const Vec2& b1, const Vec2& z0, double s) {
  const Mat2 sA = s * A;
  const Vec2 e = expm(sA) * z0;
  const Vec2 p1 = phi_matrix(1, sA) * b0;
  const Vec2 p2 = phi_matrix(2, sA) * b1;
  return {e[0] + s * p1[0] + s * s * p2[0], e[1] + s * p1[1] + s * s * p2[1]};
}

}  // namespace fsplay
