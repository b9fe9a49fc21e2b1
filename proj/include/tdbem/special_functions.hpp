// Copyright 2026 The tdbem Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace tdbem {

using Complex = std::complex<double>;

/// Raised when a routine is called outside its domain (here: Re z <= 0,
/// non-finite arguments, or an unsupported order).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Modified Bessel function of the second kind, order 0, for Re z > 0.
///
/// Power series for |z| <= 2 and Steed's continued fraction above. Values
/// underflow gracefully to zero once Re z exceeds roughly 745.
Complex bessel_k0(Complex z);

/// Order-1 counterpart of bessel_k0().
Complex bessel_k1(Complex z);

struct BesselK01 {
  Complex k0;
  Complex k1;
};

/// K0(z) and K1(z) from a single evaluation. This is what the kernels call.
BesselK01 bessel_k01(Complex z);

/// exp(z) K0(z) and exp(z) K1(z); finite for any Re z > 0.
BesselK01 bessel_k01_scaled(Complex z);

/// K0(s r) and K1(s r) for a fixed s and real r > 0, tuned for the many
/// kernel evaluations of one assembly. Uses the ascending series in (s r)^2
/// for |s r| <= 2 and piecewise Chebyshev interpolants of exp(s r) K(s r) on
/// dyadic r-intervals (each split at 3/4) up to r_max. Beyond r_max the
/// direct routine is used.
class BesselK01Table {
 public:
  BesselK01Table(Complex s, double r_max);

  Complex frequency() const { return s_; }
  BesselK01 operator()(double r) const;

 private:
  static constexpr int kTerms = 17;

  Complex s_;
  double r0_ = 0.0;
  double r_max_ = 0.0;
  Complex log_half_s_;
  int octaves_ = 0;
  // [octave][half][term] -> (k0, k1) coefficients
  std::vector<Complex> coeffs_;
};

/// K_n(z) for 0 <= n <= 17 by upward recurrence from K0 and K1.
Complex bessel_k(int n, Complex z);

/// I_n(z) for 0 <= n <= 17, Re z > 0.
Complex bessel_i(int n, Complex z);

struct IKProducts {
  Complex value;       ///< I_n(z) K_n(z)
  Complex derivative;  ///< I_n'(z) K_n'(z)
};

/// Products I_n K_n and I_n' K_n' for 0 <= n <= 16, Re z > 0.
///
/// For large |z| the factors are combined through the Wronskian so that the
/// exponentially large I_n and exponentially small K_n never appear alone.
IKProducts bessel_ik_products(int n, Complex z);

}  // namespace tdbem
