#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "starweyl/sectors.hpp"
#include "support.hpp"

using namespace starweyl;

TEST_CASE("second-order frames") {
    const auto f = sector_frame(2, M_PI / 4);
    CHECK(f.eta == std::vector<int>{1, 0});
    CHECK(std::abs(f.roots[0] - (-1.0)) < 1e-15);
    CHECK(std::abs(f.roots[1] - 1.0) < 1e-15);
    CHECK(f.sector == 0);

    const auto g = sector_frame(2, 0.0);
    CHECK(g.eta == std::vector<int>{1, 0});

    try {
        sector_frame(2, M_PI / 2);
        FAIL("expected a boundary error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BoundaryArgument);
    }
    CHECK_THROWS_AS(sector_frame(2, M_PI / 2 + 1e-11), Error);
    CHECK_NOTHROW(sector_frame(2, M_PI / 2 + 1e-6));
}

TEST_CASE("argument outside the principal range is rejected") {
    CHECK_THROWS_AS(sector_frame(3, -M_PI), Error);
    CHECK_THROWS_AS(sector_frame(3, 4.0), Error);
}

TEST_CASE("frames order the real parts strictly and permute the roots") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> arg(-M_PI + 1e-3, M_PI);
    for (int n = 2; n <= 6; ++n) {
        for (int t = 0; t < 40; ++t) {
            const double a = arg(rng);
            SectorFrame f;
            try {
                f = sector_frame(n, a);
            } catch (const Error&) {
                continue;
            }
            CHECK(f.sector == static_cast<int>(std::floor(a * n / M_PI)));
            std::vector<int> sorted = f.eta;
            std::sort(sorted.begin(), sorted.end());
            std::vector<int> expect(n);
            std::iota(expect.begin(), expect.end(), 0);
            CHECK(sorted == expect);
            const cplx rho = std::polar(1.0, a);
            for (int k = 0; k < n; ++k)
                CHECK(std::abs(f.roots[k] - std::polar(1.0, 2 * M_PI * f.eta[k] / n)) < 1e-15);
            for (int k = 1; k < n; ++k)
                CHECK((rho * f.roots[k - 1]).real() < (rho * f.roots[k]).real() - 1e-9);
        }
    }
}

TEST_CASE("complex_power uses the principal argument") {
    CHECK(std::abs(complex_power(-1.0, 0.5) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(complex_power(4.0, 0.5) - 2.0) < 1e-15);
    CHECK(std::abs(complex_power(cplx(0, 1), 2.0) - (-1.0)) < 1e-15);
    // -1 - 0i carries argument pi, not -pi.
    CHECK(std::abs(complex_power(cplx(-1.0, -0.0), 0.5) - cplx(0, 1)) < 1e-15);
    CHECK_THROWS_AS(complex_power(0.0, 1.5), Error);
}

TEST_CASE("complex_power matches repeated multiplication for integer exponents") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const cplx rho(u(rng), u(rng));
        cplx acc = 1.0;
        for (int m = 1; m <= 8; ++m) {
            acc *= rho;
            CHECK(testing::rel_err(complex_power(rho, static_cast<double>(m)), acc) < 1e-14);
        }
    }
}

TEST_CASE("root powers follow the eta convention") {
    const auto f = sector_frame(2, M_PI / 4);
    CHECK(std::abs(root_power(f, 1, 1.0) - (-1.0)) < 1e-15);
    CHECK(std::abs(root_power(f, 1, 0.5) - cplx(0, 1)) < 1e-15);
    CHECK(root_power(f, 2, cplx(0.3, 1.7)) == cplx(1.0));

    const auto g = sector_frame(5, 0.2);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 1; k <= 5; ++k)
        for (int t = 0; t < 10; ++t) {
            const cplx a(u(rng), u(rng)), b(u(rng), u(rng));
            CHECK(testing::rel_err(root_power(g, k, a + b), root_power(g, k, a) * root_power(g, k, b)) < 1e-13);
        }
}

TEST_CASE("omega constants") {
    std::vector<cplx> nu0{0.0};
    const auto classical = solve_exponents(build_indicial(2, nu0));
    const auto f = sector_frame(2, M_PI / 4);
    const auto om = omega_constants(f, classical);
    CHECK(om.big[0] == cplx(1.0));
    CHECK(std::abs(om.big[1] - 1.0) < 1e-12);
    CHECK(std::abs(om.big[2] - 2.0) < 1e-12);
    CHECK(std::abs(om.small[0] - 1.0) < 1e-12);
    CHECK(std::abs(om.small[1] - 0.5) < 1e-12);

    std::vector<cplx> nu1{-2.0};
    const auto singular = solve_exponents(build_indicial(2, nu1));
    const auto os = omega_constants(f, singular);
    CHECK(std::abs(os.big[1] - (-1.0)) < 1e-12);
    CHECK(std::abs(os.small[0] - (-1.0)) < 1e-12);
}

TEST_CASE("omega product telescopes to the last determinant") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int checked = 0;
    for (int t = 0; t < 60; ++t) {
        const int n = 2 + t % 3;
        std::vector<cplx> nu;
        for (int mu = 0; mu < n - 1; ++mu)
            nu.emplace_back(u(rng), u(rng));
        ExponentSet ex;
        try {
            ex = solve_exponents(build_indicial(n, nu));
        } catch (const AdmissibilityError&) {
            continue;
        }
        const auto om = omega_constants(sector_frame(n, 0.3), ex);
        cplx prod = 1.0;
        for (cplx w : om.small)
            prod *= w;
        CHECK(testing::rel_err(prod, 1.0 / om.big[n]) < 1e-12);
        ++checked;
    }
    CHECK(checked > 20);
}
