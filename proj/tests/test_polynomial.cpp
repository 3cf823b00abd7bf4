#include <doctest.h>

#include <cmath>

#include "esta/errors.hpp"
#include "esta/polynomial.hpp"
#include "esta/quadrature.hpp"

using namespace esta;

TEST_SUITE_BEGIN("polynomial");

TEST_CASE("evaluation and derivatives in the scaled variable") {
    // p(t) = 2 + 3 (t/4) + (t/4)^2 over [0, 4]
    Eigen::VectorXd c(3);
    c << 2.0, 3.0, 1.0;
    const Polynomial p(c, 4.0);
    CHECK(p(0.0) == doctest::Approx(2.0));
    CHECK(p(4.0) == doctest::Approx(6.0));
    CHECK(p(2.0) == doctest::Approx(2.0 + 1.5 + 0.25));
    CHECK(p.derivative(0.0, 1) == doctest::Approx(3.0 / 4.0));
    CHECK(p.derivative(4.0, 2) == doctest::Approx(2.0 / 16.0));
    CHECK(p.derivative(1.0, 3) == doctest::Approx(0.0));
}

TEST_CASE("definite integral matches quadrature") {
    Eigen::VectorXd c(4);
    c << 0.5, -1.0, 2.0, 0.25;
    const Polynomial p(c, 3.0);
    const QuadratureRule& gl = gauss_legendre(16);
    double acc = 0.0;
    for (int i = 0; i < gl.nodes.size(); ++i) {
        const double t = 1.5 * (1.0 + gl.nodes[i]);
        acc += 1.5 * gl.weights[i] * p(t);
    }
    CHECK(p.definite_integral(0.0, 3.0) == doctest::Approx(acc).epsilon(1e-13));
}

TEST_CASE("fit_polynomial reproduces value and derivative constraints") {
    std::vector<PolyConstraint> cs = {
        {0.0, 0, 1.0}, {2.0, 0, -3.0}, {0.0, 1, 0.5}, {2.0, 1, 0.0}, {1.0, 0, 0.0}};
    const Polynomial p = fit_polynomial(cs, 2.0);
    CHECK(p.degree() == 4);
    CHECK(p(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p(2.0) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(p.derivative(0.0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.derivative(2.0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(p(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("polynomial addition and scaling") {
    Eigen::VectorXd a(2), b(3);
    a << 1.0, 2.0;
    b << 0.0, -1.0, 4.0;
    const Polynomial p(a, 2.0), q(b, 2.0);
    const Polynomial sum = p + q * 2.0;
    CHECK(sum(2.0) == doctest::Approx(p(2.0) + 2.0 * q(2.0)));
    CHECK(sum(0.7) == doctest::Approx(p(0.7) + 2.0 * q(0.7)));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(Polynomial(Eigen::VectorXd::Ones(2), 0.0), DomainError);
    CHECK_THROWS_AS(fit_polynomial(std::vector<PolyConstraint>{}, 1.0), DomainError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("polynomial"); // quadrature checks live with the polynomial utilities

TEST_CASE("gauss legendre integrates polynomials exactly") {
    const QuadratureRule& gl = gauss_legendre(5);
    double acc = 0.0;
    for (int i = 0; i < gl.nodes.size(); ++i) {
        const double x = gl.nodes[i];
        acc += gl.weights[i] * (x * x * x * x * x * x + 2.0 * x * x);
    }
    // int_{-1}^{1} x^6 + 2 x^2 dx = 2/7 + 4/3
    CHECK(acc == doctest::Approx(2.0 / 7.0 + 4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("gauss hermite integrates against the oscillator weight") {
    const QuadratureRule& gh = gauss_hermite(32);
    double m0 = 0.0, m2 = 0.0;
    for (int i = 0; i < gh.nodes.size(); ++i) {
        m0 += gh.weights[i];
        m2 += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
    }
    CHECK(m0 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("normalized hermite functions are orthonormal under the weight") {
    const QuadratureRule& gh = gauss_hermite(48);
    for (int n = 0; n <= 4; ++n)
        for (int m = n; m <= 4; ++m) {
            double acc = 0.0;
            for (int i = 0; i < gh.nodes.size(); ++i)
                acc += gh.weights[i] * hermite_normalized(n, gh.nodes[i]) *
                       hermite_normalized(m, gh.nodes[i]);
            CHECK(acc == doctest::Approx(n == m ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
        }
}

TEST_CASE("composite rule covers the interval") {
    const CompositeRule rule = composite_gauss_legendre(1.0, 3.0, 4, 6);
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * rule.nodes[i];
    CHECK(acc == doctest::Approx(4.0).epsilon(1e-14)); // int_1^3 t dt
}

TEST_SUITE_END();
