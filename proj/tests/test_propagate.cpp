#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "starweyl/frobenius.hpp"
#include "starweyl/propagate.hpp"
#include "support.hpp"

using namespace starweyl;

namespace {

double matrix_rel(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd hyperbolic(double x, cplx rho) {
    Eigen::MatrixXcd w(2, 2);
    w << std::cosh(rho * x), rho * std::sinh(rho * x), std::sinh(rho * x) / rho, std::cosh(rho * x);
    return w;
}

}  // namespace

TEST_CASE("companion structure") {
    const auto classical = testing::plain_edge(2, {0.0});
    Eigen::VectorXcd v(2);
    v << 1.0, 0.0;
    Eigen::VectorXcd d = companion_apply(classical, 1.0, 0.5, v);
    CHECK(d(0) == cplx(0.0));
    CHECK(d(1) == cplx(1.0));

    const auto singular = testing::plain_edge(2, {-2.0});
    d = companion_apply(singular, 0.0, 0.5, v);
    CHECK(d(0) == cplx(0.0));
    CHECK(std::abs(d(1) - 8.0) < 1e-14);

    auto cubic = testing::plain_edge(3, {3.0, -3.0});
    Eigen::VectorXcd w(3);
    w << 2.0, cplx(0, 5), -7.0;
    d = companion_apply(cubic, 2.0, 0.7, w);
    CHECK(d(0) == w(1));
    CHECK(d(1) == w(2));
    const cplx last = 2.0 * w(0) - (3.0 / std::pow(0.7, 3)) * w(0) - (-3.0 / std::pow(0.7, 2)) * w(1);
    CHECK(std::abs(d(2) - last) < 1e-12);
}

TEST_CASE("classical basis equals cosh and sinh") {
    const auto e = testing::classical_edge();
    const auto b = integrate_basis(e, 1.0);
    CHECK(b.x == 1.0);
    CHECK(matrix_rel(b.values, hyperbolic(1.0, 1.0)) < 1e-9);
    CHECK(std::abs(b.values(0, 0) - 1.5430806) < 1e-7);
    CHECK(std::abs(b.values(0, 1) - 1.1752012) < 1e-7);
    CHECK(b.wronskian_drift <= 1e-7);

    const cplx rho(2.0, 1.5);
    CHECK(matrix_rel(integrate_basis(e, rho * rho).values, hyperbolic(1.0, rho)) < 1e-9);
}

TEST_CASE("zero spectral parameter") {
    const auto e = testing::classical_edge();
    const auto b = integrate_basis(e, 0.0);
    Eigen::MatrixXcd expect(2, 2);
    expect << 1.0, 0.0, 1.0, 1.0;
    CHECK((b.values - expect).cwiseAbs().maxCoeff() < 1e-10);

    // Euler equation: x^{-1}/3 and x^2 are exact solutions.
    const auto s = prepare_edge(testing::plain_edge(2, {-2.0}));
    const auto bs = integrate_basis(s, 0.0);
    Eigen::MatrixXcd euler(2, 2);
    euler << 1.0 / 3.0, -1.0 / 3.0, 1.0, 2.0;
    CHECK((bs.values - euler).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(bs.values.determinant() - 1.0) < 1e-9);
}

TEST_CASE("dense output") {
    const auto e = testing::classical_edge();
    std::vector<double> one{1.0};
    const auto single = integrate_dense(e, 1.0, one);
    REQUIRE(single.size() == 1);
    CHECK(matrix_rel(single[0].values, integrate_basis(e, 1.0).values) < 1e-12);

    std::vector<double> mesh{0.5, 1.0};
    const auto two = integrate_dense(e, 1.0, mesh);
    REQUIRE(two.size() == 2);
    CHECK(two[0].x == 0.5);
    CHECK(matrix_rel(two[0].values, hyperbolic(0.5, 1.0)) < 1e-9);
    CHECK(matrix_rel(two[1].values, hyperbolic(1.0, 1.0)) < 1e-9);

    CHECK(integrate_dense(e, 1.0, {}).empty());

    std::vector<double> at_collar{0.05, 0.3};
    const auto c = integrate_dense(e, 1.0, at_collar);
    REQUIRE(c.size() == 2);
    CHECK(matrix_rel(c[0].values, hyperbolic(0.05, 1.0)) < 1e-12);

    std::vector<double> bad{0.6, 0.4};
    CHECK_THROWS_AS(integrate_dense(e, 1.0, bad), Error);
    std::vector<double> outside{0.01, 0.5};
    CHECK_THROWS_AS(integrate_dense(e, 1.0, outside), Error);
}

TEST_CASE("unit Wronskian for random admissible edges") {
    std::mt19937 rng(31);
    for (int t = 0; t < 50; ++t) {
        const auto e = testing::random_edge(rng, 2 + t % 2, 0.1);
        const cplx lambda = testing::random_lambda(rng, 100.0);
        const auto b = integrate_basis(e, lambda);
        CHECK(std::abs(b.values.determinant() - 1.0) <= 1e-7);
        CHECK(b.wronskian_drift <= 1e-7);
    }
}

TEST_CASE("start point inside the collar does not matter") {
    auto near = testing::plain_edge(2, {-2.0}, 1.0, 0.1);
    near.potentials[0] = CollaredPolynomial(0.5, {2.0, -1.0, 3.0});
    auto far = near;
    far.collar = 0.3;
    for (cplx lambda : {cplx(1.0), cplx(-20.0, 3.0), cplx(0.0, 40.0)}) {
        const auto a = integrate_basis(prepare_edge(near), lambda);
        const auto b = integrate_basis(prepare_edge(far), lambda);
        CHECK(matrix_rel(a.values, b.values) < 1e-8);
    }
}

TEST_CASE("propagation is linear in the initial data") {
    std::mt19937 rng(37);
    for (int t = 0; t < 10; ++t) {
        const auto e = testing::random_edge(rng, 2 + t % 2, 0.1);
        const cplx lambda = testing::random_lambda(rng, 50.0);
        const auto start = basis_at_collar(e, lambda);
        const cplx a(0.3, -1.2), b(2.0, 0.5);
        Eigen::MatrixXcd combo = a * start.values.row(0) + b * start.values.row(1);
        const IntegrationSettings settings;
        const auto rows = propagate_rows(e.edge, lambda, e.edge.collar, e.edge.length, start.values, settings);
        const auto single = propagate_rows(e.edge, lambda, e.edge.collar, e.edge.length, combo, settings);
        const Eigen::RowVectorXcd expect = a * rows.row(0) + b * rows.row(1);
        CHECK((single.row(0) - expect).cwiseAbs().maxCoeff() <= 1e-9 * expect.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("backward propagation returns to the start") {
    const auto e = testing::classical_edge();
    const auto start = basis_at_collar(e, 4.0);
    const IntegrationSettings settings;
    const auto there = propagate_rows(e.edge, 4.0, 0.05, 1.0, start.values, settings);
    const auto back = propagate_rows(e.edge, 4.0, 1.0, 0.05, there, settings);
    CHECK(matrix_rel(back, start.values) < 1e-9);
}

TEST_CASE("basis values are analytic in the spectral parameter") {
    auto edge = testing::plain_edge(2, {-2.0});
    edge.potentials[0] = CollaredPolynomial(0.4, {1.0, 1.0});
    const auto e = prepare_edge(edge);
    const cplx centre(3.0, 1.0);
    const double radius = 0.5;
    const int points = 32;
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(2, 2);
    double winding = 0.0;
    cplx prev_det;
    for (int i = 0; i <= points; ++i) {
        const cplx lambda = centre + std::polar(radius, 2 * M_PI * i / points);
        const auto b = integrate_basis(e, lambda);
        const cplx det = b.values.determinant();
        CHECK(std::abs(det - 1.0) <= 1e-7);
        if (i > 0)
            winding += std::arg(det / prev_det);
        prev_det = det;
        if (i < points)
            mean += b.values / double(points);
    }
    // The determinant never circles the origin, and the Cauchy mean over the
    // contour reproduces the value at its centre.
    CHECK(std::abs(winding) < 1e-6);
    CHECK(matrix_rel(mean, integrate_basis(e, centre).values) < 1e-6);
}

TEST_CASE("integration settings are validated") {
    IntegrationSettings s;
    s.rtol = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    IntegrationSettings few;
    few.max_steps = 3;
    try {
        integrate_basis(testing::classical_edge(), cplx(900.0, 5.0), few);
        FAIL("expected step limit");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepLimitExceeded);
    }
}
