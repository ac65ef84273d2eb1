#pragma once

namespace groove::specfun {

// Gamma(p) for p > 0. Lanczos approximation, relative error below 1e-13 on
// the argument range used here (everything this project needs is in (0, 50]).
double gamma_fn(double p);

// Beta(a, b) = Gamma(a) Gamma(b) / Gamma(a+b) for a, b > 0.
double beta_fn(double a, double b);

// Closed form of the quartic-exponential moment
//
//   int_0^inf xi^p exp(-xi^4 sigma) dxi = (1/4) Gamma((p+1)/4) sigma^{-(p+1)/4}
//
// for p > -1, sigma > 0.
double quartic_moment(double p, double sigma);

}  // namespace groove::specfun
