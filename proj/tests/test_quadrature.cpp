#include <cmath>

#include "doctest.h"
#include "groove/chebyshev.hpp"
#include "groove/quadrature.hpp"

using namespace groove;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
    for (int n : {4, 8, 12}) {
        auto f = [n](double x) { return std::pow(x, 2 * n - 1) + std::pow(x, 2 * n - 2); };
        const double exact = 2.0 / (2.0 * n - 1.0);
        CHECK(quad::gl(f, -1.0, 1.0, n) == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("panel and adaptive rules agree on a smooth oscillatory integral") {
    auto f = [](double x) { return std::exp(-x) * std::cos(7.0 * x); };
    const double exact = (1.0 - std::exp(-2.0) * (std::cos(14.0) - 7.0 * std::sin(14.0))) / 50.0;
    CHECK(quad::panels(f, 0.0, 2.0, 0.2, 10) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(quad::adaptive(f, 0.0, 2.0, 1e-12) == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("adaptive rule hunts down an endpoint singularity") {
    const double v = quad::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-11);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("chebyshev fit reproduces a smooth function and its derivative") {
    auto f = [](double x) { return std::sin(3.0 * x) * std::exp(-0.2 * x * x); };
    auto s = cheb::fit(f, -2.0, 5.0, 1e-13);
    auto ds = s.derivative();
    for (double x : {-1.9, -0.3, 0.0, 1.7, 4.9}) {
        CHECK(s.eval(x) == doctest::Approx(f(x)).epsilon(1e-11));
        const double dfdx = 3.0 * std::cos(3.0 * x) * std::exp(-0.2 * x * x) -
                            0.4 * x * f(x);
        CHECK(ds.eval(x) == doctest::Approx(dfdx).epsilon(1e-9));
    }
    CHECK(s.integral() ==
          doctest::Approx(quad::adaptive(f, -2.0, 5.0, 1e-13)).epsilon(1e-11));
}
