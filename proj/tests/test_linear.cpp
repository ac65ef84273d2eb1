#include <cmath>
#include <stdexcept>
#include <functional>
#include <random>

#include "doctest.h"
#include "groove/kernel.hpp"
#include "groove/linear.hpp"
#include "groove/specfun.hpp"

using namespace groove;

namespace {

// 7-point sixth-order central first derivative
double fd7(const std::function<double(double)>& f, double y, double h) {
    return (-f(y - 3 * h) + 9 * f(y - 2 * h) - 45 * f(y - h) + 45 * f(y + h) -
            9 * f(y + 2 * h) + f(y + 3 * h)) /
           (60.0 * h);
}

}  // namespace

TEST_CASE("angle weight of the flux datum") {
    CHECK(linear::c_beta(M_PI / 4.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(linear::c_beta(1e-9) == doctest::Approx(3e-9).epsilon(1e-6));
    const double tb = std::tan(0.1);
    CHECK(linear::c_beta(0.1) == doctest::Approx(3.0 * tb / (1.0 + tb * tb)).epsilon(1e-14));
    CHECK(linear::c_beta(0.1) == doctest::Approx(0.298004).epsilon(1e-5));
    CHECK(linear::c_beta(0.3) < 3.0 * std::tan(0.3));
    CHECK_THROWS_AS(linear::c_beta(0.0), std::domain_error);
    CHECK_THROWS_AS(linear::c_beta(2.0), std::domain_error);
}

TEST_CASE("slope-datum profile boundary values") {
    const double g34 = specfun::gamma_fn(0.75);
    CHECK(linear::u1_profile(0, 0.0) == doctest::Approx(-2.0 / M_PI * g34).epsilon(1e-10));
    CHECK(linear::u1_profile(1, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(linear::u1_profile(3, 0.0) == 0.0);
}

TEST_CASE("slope-datum profile is bounded by its origin value") {
    const double bound = 2.0 / M_PI * specfun::gamma_fn(0.75);
    for (int i = 0; i <= 120; ++i) {
        const double y = 30.0 * i / 120.0;
        CHECK(std::abs(linear::u1_profile(0, y)) <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("curvature of the slope-datum profile equals the kernel profile") {
    for (int i = 0; i <= 100; ++i) {
        const double y = 10.0 * i / 100.0;
        CHECK(std::abs(linear::u1_profile(2, y) + 2.0 * kernel::scaled_kernel(0, y)) <= 1e-10);
    }
}

TEST_CASE("flux-datum profile boundary values") {
    const double expect0 =
        specfun::gamma_fn(0.25) / (2.0 * M_PI) * specfun::beta_fn(0.5, 0.75);
    CHECK(linear::u2_profile(0, 0.0) == doctest::Approx(expect0).epsilon(1e-8));
    CHECK(expect0 == doctest::Approx(1.3828).epsilon(1e-4));
    CHECK(std::abs(linear::u2_profile(1, 0.0)) <= 1e-12);
    CHECK(linear::u2_profile(3, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flux-datum profile is bounded by its origin value") {
    const double bound = linear::u2_profile(0, 0.0);
    for (int i = 0; i <= 60; ++i) {
        const double y = 24.0 * i / 60.0;
        CHECK(std::abs(linear::u2_profile(0, y)) <= bound * (1.0 + 1e-10));
    }
}

TEST_CASE("derivative ladders are consistent") {
    const double h = 1e-2;
    for (int k = 0; k <= 2; ++k)
        for (double y : {0.5, 1.3, 2.7, 5.1}) {
            const double d1 =
                fd7([&](double s) { return linear::u1_profile(k, s); }, y, h);
            CHECK(std::abs(d1 - linear::u1_profile(k + 1, y)) <= 1e-7);
            const double d2 =
                fd7([&](double s) { return linear::u2_profile(k, s); }, y, h);
            CHECK(std::abs(d2 - linear::u2_profile(k + 1, y)) <= 1e-7);
        }
}

TEST_CASE("combined linear profile honors both boundary data") {
    const double beta = 0.2, B = 0.37;
    const double tb = std::tan(beta), cb = linear::c_beta(beta);
    CHECK(linear::u_linear(1, 0.0, beta, B) == doctest::Approx(tb).epsilon(1e-12));
    CHECK(linear::u_linear(3, 0.0, beta, B) == doctest::Approx(cb * B).epsilon(1e-9));
    for (double y : {0.0, 1.0, 3.5})
        CHECK(linear::u_linear(2, y, beta, 0.0) ==
              doctest::Approx(tb * linear::u1_profile(2, y)).epsilon(1e-13));
}

TEST_CASE("general-trace evaluator reduces to the unit-trace profile") {
    // h = 1 means b(t) = t^{-1/2}, the self-similar datum
    std::vector<double> tn, hv;
    for (int j = 1; j <= 24; ++j) {
        tn.push_back(16.0 * std::pow(j / 24.0, 4.0));
        hv.push_back(1.0);
    }
    linear::BoundaryTrace trace(tn, hv);
    CHECK(linear::u2_general(trace, 0, 0.0, 1.0) ==
          doctest::Approx(linear::u2_profile(0, 0.0)).epsilon(1e-7));
    // t^{1/4} scaling: value at t = 16 doubles the t = 1 value
    CHECK(linear::u2_general(trace, 0, 0.0, 16.0) ==
          doctest::Approx(2.0 * linear::u2_profile(0, 0.0)).epsilon(1e-7));
    // interior point and derivatives
    for (int k = 0; k <= 3; ++k) {
        const double got = linear::u2_general(trace, k, 0.8, 1.0);
        const double want = linear::u2_profile(k, 0.8);
        CHECK(got == doctest::Approx(want).epsilon(1e-6));
    }
    CHECK_THROWS_AS(linear::u2_general(trace, 0, 0.0, 17.0), std::domain_error);
}

TEST_CASE("general-trace evaluator: zero trace and linearity") {
    std::vector<double> tn{0.1, 0.4, 1.0}, z{0.0, 0.0, 0.0};
    linear::BoundaryTrace zero(tn, z);
    for (int k = 0; k <= 3; ++k) CHECK(linear::u2_general(zero, k, 0.7, 0.9) == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> h1, h2, hsum;
    for (std::size_t i = 0; i < tn.size(); ++i) {
        h1.push_back(u(rng));
        h2.push_back(u(rng));
        hsum.push_back(h1.back() + 2.5 * h2.back());
    }
    linear::BoundaryTrace a(tn, h1), b(tn, h2), c(tn, hsum);
    for (int k = 0; k <= 2; ++k) {
        const double lhs = linear::u2_general(c, k, 0.5, 0.8);
        const double rhs = linear::u2_general(a, k, 0.5, 0.8) +
                           2.5 * linear::u2_general(b, k, 0.5, 0.8);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("trace validation") {
    CHECK_THROWS(linear::BoundaryTrace({0.5, 0.2}, {1.0, 1.0}));     // not ascending
    CHECK_THROWS(linear::BoundaryTrace({0.2, 0.5}, {1.0, -1.0}));    // negative h
    CHECK_THROWS(linear::BoundaryTrace({0.0, 0.5}, {1.0, 1.0}));     // nonpositive node
}

TEST_CASE("sampled linear profiles decay at the far end") {
    auto lp = linear::LinearProfiles::build(0.06, 12.0);
    CHECK(lp.y_nodes.back() >= 34.0);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(lp.u1[k].back()) < 1e-10);
        CHECK(std::abs(lp.u2[k].back()) < 1e-10);
    }
    // interior samples match the point evaluators
    const std::size_t mid = lp.y_nodes.size() / 5;
    CHECK(lp.u1[0][mid] == doctest::Approx(linear::u1_profile(0, lp.y_nodes[mid])).epsilon(1e-12));
    CHECK(lp.u2[2][mid] == doctest::Approx(linear::u2_profile(2, lp.y_nodes[mid])).epsilon(1e-10));
}
