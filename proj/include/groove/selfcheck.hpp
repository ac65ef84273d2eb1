#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace groove::selfcheck {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Independent quadrature oracles used by the checks (and by the test suites).
double gamma_quad(double p);                        // int_0^inf eta^{p-1} e^{-eta}
double quartic_moment_quad(double p, double sigma); // int_0^inf xi^p e^{-xi^4 sigma}

// Direct signed space-time quadrature of the smoothing term
//   -int_0^t int_R (d/dx G)(x - z, t - tau) (P f)(z, tau) dz dtau
// for the self-similar source tau^{-1/2} F(z tau^{-1/4}), without the scaled
// change of variables or the zero-mass subtraction the production evaluator
// uses.
double duhamel_oracle_2d(const std::function<double(double)>& F, double x, double t,
                         double tol);

std::vector<CheckResult> run_all_collect();

// Prints one pass/fail line per check; true when everything passed.
bool run_all(std::ostream& os);

}  // namespace groove::selfcheck
