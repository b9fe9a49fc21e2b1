// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdbem/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace tdbem {

namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxOrder = 17;
constexpr int kMaxIterations = 100000;

void check_argument(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("Bessel argument is not finite");
  }
  if (!(z.real() > 0.0)) {
    throw DomainError("Bessel argument must have a positive real part");
  }
}

void check_order(int n, int max_order) {
  if (n < 0 || n > max_order) {
    throw DomainError("Bessel order out of the supported range");
  }
}

// Ascending series (Abramowitz & Stegun 9.6.13 and 9.6.11 with n = 1).
BesselK01 k01_series(Complex z) {
  const Complex y = 0.25 * z * z;
  const Complex log_half = std::log(0.5 * z) + std::numbers::egamma;

  Complex term0 = 1.0;  // y^k / (k!)^2
  Complex term1 = 1.0;  // y^k / (k! (k+1)!)
  Complex i0 = 1.0;
  Complex i1 = 1.0;
  Complex tail0 = 0.0;
  Complex tail1 = 1.0;  // (H_0 + H_1) at k = 0
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double kk = static_cast<double>(k);
    term0 *= y / (kk * kk);
    term1 *= y / (kk * (kk + 1.0));
    const double next = harmonic + 1.0 / kk;
    i0 += term0;
    i1 += term1;
    tail0 += next * term0;
    tail1 += (next + next + 1.0 / (kk + 1.0)) * term1;
    harmonic = next;
    if (std::abs(term0) < kEps * std::abs(i0) && std::abs(term1) < kEps * std::abs(i1)) {
      break;
    }
  }
  i1 *= 0.5 * z;
  BesselK01 out;
  out.k0 = -log_half * i0 + tail0;
  out.k1 = 1.0 / z + log_half * i1 - 0.25 * z * tail1;
  return out;
}

// Steed's continued fraction CF2 (Temme's normalisation), order mu = 0.
// Returns exp(z) K0(z) and exp(z) K1(z).
BesselK01 k01_scaled_cf2(Complex z) {
  Complex b = 2.0 * (1.0 + z);
  Complex d = 1.0 / b;
  Complex h = d;
  Complex delh = d;
  Complex q1 = 0.0;
  Complex q2 = 1.0;
  const double a1 = 0.25;
  Complex q = a1;
  double c = a1;
  double a = -a1;
  Complex s = 1.0 + q * delh;
  int i = 1;
  for (; i < kMaxIterations; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const Complex qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const Complex dels = q * delh;
    s += dels;
    if (std::abs(dels) < kEps * std::abs(s)) {
      break;
    }
  }
  if (i == kMaxIterations) {
    throw DomainError("continued fraction for K0/K1 did not converge");
  }
  h *= a1;
  BesselK01 out;
  out.k0 = std::sqrt(std::numbers::pi / (2.0 * z)) / s;
  out.k1 = out.k0 * (z + 0.5 - h) / z;
  return out;
}

BesselK01 k01_scaled(Complex z) {
  if (std::abs(z) <= 2.0) {
    const BesselK01 k = k01_series(z);
    const Complex e = std::exp(z);
    return {k.k0 * e, k.k1 * e};
  }
  return k01_scaled_cf2(z);
}

// exp(z) K_j(z) for j = 0..n+1.
void k_scaled_sequence(Complex z, int n, Complex* out) {
  const BesselK01 k = k01_scaled(z);
  out[0] = k.k0;
  out[1] = k.k1;
  for (int j = 1; j <= n; ++j) {
    out[j + 1] = out[j - 1] + (2.0 * j / z) * out[j];
  }
}

// I_n(z) by its ascending series. Accurate while |z| - Re z stays moderate.
Complex i_series(int n, Complex z) {
  const Complex y = 0.25 * z * z;
  Complex lead = 1.0;
  for (int j = 1; j <= n; ++j) {
    lead *= 0.5 * z / static_cast<double>(j);
  }
  Complex term = 1.0;
  Complex sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= y / (static_cast<double>(k) * static_cast<double>(k + n));
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum)) {
      break;
    }
  }
  return lead * sum;
}

bool series_is_accurate(Complex z) {
  const double r = std::abs(z);
  return r <= 20.0 && r - z.real() <= 8.0;
}

// I_{n+1}(z) / I_n(z) by modified Lentz on the continued fraction
// 1 / (2(n+1)/z + 1 / (2(n+2)/z + ...)).
Complex i_ratio(int n, Complex z) {
  constexpr double tiny = 1e-300;
  Complex f = tiny;
  Complex c = f;
  Complex d = 0.0;
  const Complex inv_z = 1.0 / z;
  for (int j = 1; j < kMaxIterations; ++j) {
    const Complex bj = 2.0 * (n + j) * inv_z;
    d = bj + d;
    if (std::abs(d) == 0.0) d = tiny;
    c = bj + 1.0 / c;
    if (std::abs(c) == 0.0) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return f;
    }
  }
  throw DomainError("continued fraction for I_{n+1}/I_n did not converge");
}

}  // namespace

BesselK01 bessel_k01(Complex z) {
  check_argument(z);
  if (std::abs(z) <= 2.0) {
    return k01_series(z);
  }
  const BesselK01 k = k01_scaled_cf2(z);
  const Complex e = std::exp(-z);
  return {k.k0 * e, k.k1 * e};
}

BesselK01 bessel_k01_scaled(Complex z) {
  check_argument(z);
  return k01_scaled(z);
}

namespace {

struct SeriesCoefficients {
  static constexpr int kDegree = 16;
  double i0[kDegree];  // 1 / (k!)^2
  double f0[kDegree];  // H_k / (k!)^2
  double i1[kDegree];  // 1 / (k! (k+1)!)
  double f1[kDegree];  // (H_k + H_{k+1}) / (k! (k+1)!)
};

const SeriesCoefficients& series_coefficients() {
  static const SeriesCoefficients c = [] {
    SeriesCoefficients out;
    double fact = 1.0;
    double harmonic = 0.0;
    for (int k = 0; k < SeriesCoefficients::kDegree; ++k) {
      if (k > 0) {
        fact *= k;
        harmonic += 1.0 / k;
      }
      const double next = harmonic + 1.0 / (k + 1);
      out.i0[k] = 1.0 / (fact * fact);
      out.f0[k] = harmonic * out.i0[k];
      out.i1[k] = 1.0 / (fact * fact * (k + 1));
      out.f1[k] = (harmonic + next) * out.i1[k];
    }
    return out;
  }();
  return c;
}

Complex horner(const double* c, int n, Complex y) {
  Complex acc = c[n - 1];
  for (int k = n - 2; k >= 0; --k) acc = acc * y + c[k];
  return acc;
}

}  // namespace

BesselK01Table::BesselK01Table(Complex s, double r_max) : s_(s), r_max_(r_max) {
  check_argument(s);
  r0_ = 2.0 / std::abs(s);
  log_half_s_ = std::log(0.5 * s) + std::numbers::egamma;
  octaves_ = r_max > r0_ ? static_cast<int>(std::ceil(std::log2(r_max / r0_))) : 0;
  coeffs_.assign(static_cast<std::size_t>(octaves_) * 2 * kTerms * 2, 0.0);

  std::array<double, kTerms> nodes;
  for (int j = 0; j < kTerms; ++j) nodes[j] = std::cos(std::numbers::pi * (j + 0.5) / kTerms);
  std::array<BesselK01, kTerms> values;
  for (int o = 0; o < octaves_; ++o) {
    for (int half = 0; half < 2; ++half) {
      const double base = r0_ * std::ldexp(1.0, o);
      const double lo = half == 0 ? base : 1.5 * base;
      const double hi = half == 0 ? 1.5 * base : 2.0 * base;
      for (int j = 0; j < kTerms; ++j) {
        const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[j];
        values[j] = k01_scaled(s * r);
      }
      Complex* c = &coeffs_[(static_cast<std::size_t>(o) * 2 + half) * kTerms * 2];
      for (int k = 0; k < kTerms; ++k) {
        Complex a0 = 0.0;
        Complex a1 = 0.0;
        for (int j = 0; j < kTerms; ++j) {
          const double t = std::cos(std::numbers::pi * k * (j + 0.5) / kTerms);
          a0 += values[j].k0 * t;
          a1 += values[j].k1 * t;
        }
        const double scale = (k == 0 ? 1.0 : 2.0) / kTerms;
        c[2 * k] = a0 * scale;
        c[2 * k + 1] = a1 * scale;
      }
    }
  }
}

BesselK01 BesselK01Table::operator()(double r) const {
  if (!(r > 0.0)) throw DomainError("Bessel table evaluated at r <= 0");
  if (r <= r0_) {
    const SeriesCoefficients& c = series_coefficients();
    const Complex z = s_ * r;
    const Complex y = 0.25 * z * z;
    const Complex log_half = log_half_s_ + std::log(r);
    const Complex i1 = 0.5 * z * horner(c.i1, SeriesCoefficients::kDegree, y);
    return {-log_half * horner(c.i0, SeriesCoefficients::kDegree, y) +
                horner(c.f0, SeriesCoefficients::kDegree, y),
            1.0 / z + log_half * i1 - 0.25 * z * horner(c.f1, SeriesCoefficients::kDegree, y)};
  }
  if (r >= r_max_ || octaves_ == 0) return bessel_k01(s_ * r);
  int exponent = 0;
  const double mantissa = 2.0 * std::frexp(r / r0_, &exponent);  // in [1, 2)
  const int octave = std::min(exponent - 1, octaves_ - 1);
  const double x = mantissa * std::ldexp(1.0, exponent - 1 - octave);
  const int half = x < 1.5 ? 0 : 1;
  const double t = half == 0 ? 4.0 * x - 5.0 : 4.0 * x - 7.0;
  const Complex* c = &coeffs_[(static_cast<std::size_t>(octave) * 2 + half) * kTerms * 2];
  Complex b0[2] = {0.0, 0.0};
  Complex b1[2] = {0.0, 0.0};
  const double t2 = 2.0 * t;
  for (int k = kTerms - 1; k >= 1; --k) {
    for (int f = 0; f < 2; ++f) {
      const Complex b = t2 * b0[f] - b1[f] + c[2 * k + f];
      b1[f] = b0[f];
      b0[f] = b;
    }
  }
  const Complex e = std::exp(-s_ * r);
  return {(t * b0[0] - b1[0] + c[0]) * e, (t * b0[1] - b1[1] + c[1]) * e};
}

Complex bessel_k0(Complex z) { return bessel_k01(z).k0; }

Complex bessel_k1(Complex z) { return bessel_k01(z).k1; }

Complex bessel_k(int n, Complex z) {
  check_argument(z);
  check_order(n, kMaxOrder);
  Complex seq[kMaxOrder + 2];
  k_scaled_sequence(z, n, seq);
  return seq[n] * std::exp(-z);
}

Complex bessel_i(int n, Complex z) {
  check_argument(z);
  check_order(n, kMaxOrder);
  if (series_is_accurate(z)) {
    return i_series(n, z);
  }
  // Wronskian I_n K_{n+1} + I_{n+1} K_n = 1/z.
  Complex seq[kMaxOrder + 2];
  k_scaled_sequence(z, n, seq);
  const Complex r = i_ratio(n, z);
  return std::exp(z) / (z * (seq[n + 1] + r * seq[n]));
}

IKProducts bessel_ik_products(int n, Complex z) {
  check_argument(z);
  check_order(n, 16);
  Complex seq[kMaxOrder + 2];
  k_scaled_sequence(z, n, seq);
  const Complex nz = static_cast<double>(n) / z;
  const Complex k_ratio = seq[n + 1] / seq[n];  // K_{n+1} / K_n

  IKProducts out;
  Complex i_ratio_value;
  if (series_is_accurate(z)) {
    const Complex in = i_series(n, z);
    const Complex in1 = i_series(n + 1, z);
    const Complex e = std::exp(-z);
    out.value = in * (seq[n] * e);
    i_ratio_value = in1 / in;
  } else {
    i_ratio_value = i_ratio(n, z);
    out.value = seq[n] / (z * (seq[n + 1] + i_ratio_value * seq[n]));
  }
  // I_n' = I_{n+1} + (n/z) I_n,  K_n' = -K_{n+1} + (n/z) K_n.
  out.derivative = out.value * (i_ratio_value + nz) * (nz - k_ratio);
  return out;
}

}  // namespace tdbem
