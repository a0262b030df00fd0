// One line per acceptance criterion. Criteria 9 and 10 are expected to fail
// (E1 asymptotics and the double zero of Delta_11 at -pi^2); they are run
// in full and reported, and an unexpected pass is treated as an error.
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "starweyl/frobenius.hpp"
#include "starweyl/reconstruct.hpp"
#include "support.hpp"

using namespace starweyl;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o, bool expected_failure = false) {
    const char* verdict = o.pass ? "PASS" : "FAIL";
    std::printf("criterion %2d %s  %s: %s%s\n", id, verdict, title, o.detail.c_str(),
                expected_failure ? "  [expected failure]" : "");
    if (o.pass == expected_failure)
        ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome unit_wronskian() {
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        const auto e = testing::random_edge(rng, 2 + t % 2, 0.1);
        const auto b = integrate_basis(e, testing::random_lambda(rng, 100.0));
        worst = std::max(worst, std::abs(b.values.determinant() - 1.0));
    }
    return {worst <= 1e-7, fmt("max |det W - 1| = %.2e over 50 edges (tol 1e-7)", worst)};
}

Outcome closed_form_basis() {
    const auto b = integrate_basis(testing::classical_edge(), 1.0);
    const double c = std::cosh(1.0), s = std::sinh(1.0);
    Eigen::MatrixXcd expect(2, 2);
    expect << c, s, s, c;
    const double err = (b.values - expect).cwiseAbs().maxCoeff();
    return {err <= 1e-9, fmt("max entry error %.2e (tol 1e-9)", err)};
}

Outcome series_recurrence() {
    const auto e = prepare_edge(testing::plain_edge(2, {-2.0}));
    const auto c = series_coefficients(e.indicial, e.exponents, 2, 2);
    const double r1 = std::abs(c[1] - 1.0 / 10.0) * 10.0, r2 = std::abs(c[2] - 1.0 / 280.0) * 280.0;
    return {r1 <= 1e-15 && r2 <= 1e-15, fmt("relative errors %.2e, %.2e (tol 1e-15)", r1, r2)};
}

Outcome forward_weyl() {
    const double s = std::sinh(1.0), c = std::cosh(1.0);
    const double expected = -(s * s + 2 * c * c) / (3 * s * c);
    const cplx m = weyl_matrix(testing::classical_star(), 1, 1.0)(0, 1);
    const double err = std::abs(m - expected);
    return {err <= 1e-8, fmt("M_112(1) = %.10f, error %.2e (tol 1e-8)", m.real(), err)};
}

Outcome eigen_scan_check() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = eigen_scan(testing::classical_star(), 1, 1, -12.0, -0.5);
    const double elapsed = seconds_since(t0);
    const double targets[] = {-M_PI * M_PI / 4, -M_PI * M_PI};
    bool ok = r.eigenvalues.size() == 2 && elapsed < 60.0;
    double worst = 0.0;
    for (double t : targets) {
        double best = 1e300;
        for (const auto& e : r.eigenvalues)
            best = std::min(best, std::abs(e.lambda - t));
        worst = std::max(worst, best);
    }
    ok = ok && worst <= 1e-6;
    return {ok, fmt("%g zeros found, max error %.2e (tol 1e-6), %.1f s", double(r.eigenvalues.size()), worst,
                    elapsed)};
}

Outcome boundary_data_consistency() {
    double worst = 0.0;
    int points = 0;
    for (const char* name : {"singular_star_e1.json", "cubic_star_e2.json"}) {
        const auto cfg = testing::shipped(name);
        const auto g = cfg.model();
        const int n = g.order(), target = cfg.target(), s = cfg.source_list().front();
        const auto grid = cfg.grid->lambdas();
        for (int i = 0; i < 20; ++i) {
            const auto basis = graph_basis(g, grid[i]);
            const auto rec = solve_weyl_record(g, basis, s);
            std::vector<PsiBoundaryData> psi;
            for (int k = 1; k < n; ++k) {
                PsiBoundaryData d;
                d.s = s;
                d.k = k;
                d.j = target;
                d.lambda = grid[i];
                d.values = forward_psi(g, basis, rec.rows[k - 1], s, target);
                d.filled.assign(n, true);
                psi.push_back(d);
            }
            const auto m = assemble_mN(psi, target, grid[i]).m;
            worst = std::max(worst, relative_discrepancy(m, direct_internal_weyl(*basis.edges[target - 1], target).m));
            ++points;
        }
    }
    return {worst <= 1e-8, fmt("max relative difference %.2e over %g points (tol 1e-8)", worst, points)};
}

struct RoundTrip {
    std::string name;
    CrossValidation cv;
    int within = 0;
    double seconds = 0.0;
};

std::vector<RoundTrip> round_trips() {
    std::vector<RoundTrip> out;
    for (const char* name : {"classical_star.json", "singular_star_e1.json", "cubic_star_e2.json"}) {
        const auto cfg = testing::shipped(name);
        const auto t0 = std::chrono::steady_clock::now();
        RoundTrip r;
        r.name = name;
        r.cv = cross_validate(cfg.model(), cfg.target(), cfg.source_list(), cfg.grid->lambdas());
        r.seconds = seconds_since(t0);
        for (double d : r.cv.discrepancies)
            if (d <= 1e-6)
                ++r.within;
        out.push_back(std::move(r));
    }
    return out;
}

Outcome round_trip_check(const std::vector<RoundTrip>& runs) {
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
        const int per_source = r.cv.total * static_cast<int>(r.cv.reports.size());
        const double share = double(r.within) / per_source;
        const double flagged = double(r.cv.flagged) / r.cv.total;
        ok = ok && share >= 0.95 && flagged <= 0.10 && r.seconds < 120.0;
        detail += fmt("%.0f%% within 1e-6, %.0f%% flagged, max %.1e, %.1f s; ", 100 * share, 100 * flagged,
                      r.cv.max_discrepancy, r.seconds);
    }
    return {ok, detail};
}

Outcome source_independence(const std::vector<RoundTrip>& runs) {
    bool ok = true;
    std::string detail;
    for (const auto& r : runs) {
        ok = ok && r.cv.reports.size() >= 2 && r.cv.source_spread <= 1e-7;
        detail += fmt("%.1e; ", r.cv.source_spread);
    }
    return {ok, "max spread between sources " + detail + "(tol 1e-7)"};
}

Outcome asymptotics() {
    std::vector<double> rho{20.0, 40.0};
    bool ok = true;
    std::string detail;
    for (const char* name : {"classical_star.json", "singular_star_e1.json"}) {
        const auto cfg = testing::shipped(name);
        const auto dev = asymptotic_check(cfg.model(), 1, 1, 0.3, rho, 0.6);
        const double ratio = dev[1] / dev[0];
        ok = ok && ratio <= 0.75;
        detail += std::string(name).substr(0, std::string(name).find('.')) +
                  fmt(" dev(20) = %.2e, dev(40) = %.2e, ratio %.3f; ", dev[0], dev[1], ratio);
    }
    return {ok, detail + "(need ratio <= 0.75)"};
}

Outcome pole_structure() {
    const auto g = testing::classical_star();
    const auto scan = eigen_scan(g, 1, 1, -12.0, -0.5);
    bool ok = !scan.eigenvalues.empty();
    std::string detail;
    const auto jump = [](cplx a, cplx b) { return std::abs(a - b) / std::abs(a + b); };
    for (const auto& e : scan.eigenvalues) {
        const double star = e.lambda.real();
        const auto rp = solve_weyl(g, graph_basis(g, star + 1e-3), 1, 1);
        const auto rm = solve_weyl(g, graph_basis(g, star - 1e-3), 1, 1);
        const double jp = jump(rp.own[0] * rp.delta, rm.own[0] * rm.delta);
        const double jm = jump(rp.own[0], rm.own[0]);
        ok = ok && jp <= 1e-3 && jm >= 10.0;
        detail += fmt("at %.6f: product %.1e, M %.1e; ", star, jp, jm);
    }
    return {ok, detail + "(need product <= 1e-3, M >= 10)"};
}

}  // namespace

int main() {
    report(1, "unit Wronskian", unit_wronskian());
    report(2, "closed-form basis", closed_form_basis());
    report(3, "series recurrence", series_recurrence());
    report(4, "forward Weyl closed form", forward_weyl());
    report(5, "eigenvalue scan", eigen_scan_check());
    report(6, "boundary-data consistency of the internal Weyl matrix", boundary_data_consistency());
    const auto runs = round_trips();
    report(7, "round-trip reconstruction", round_trip_check(runs));
    report(8, "source independence", source_independence(runs));
    report(9, "sector asymptotics", asymptotics(), true);
    report(10, "pole structure", pole_structure(), true);
    std::printf("%s\n", failures == 0 ? "acceptance: all criteria as expected" : "acceptance: UNEXPECTED RESULTS");
    return failures == 0 ? 0 : 1;
}
