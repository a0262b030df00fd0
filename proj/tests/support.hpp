#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "starweyl/config.hpp"
#include "starweyl/errors.hpp"
#include "starweyl/reconstruct.hpp"

namespace testing {

using starweyl::cplx;

inline starweyl::RunConfig shipped(const std::string& name) {
    return starweyl::load_config(std::string(STARWEYL_CONFIG_DIR) + "/" + name);
}

inline starweyl::EdgeModel plain_edge(int order, std::vector<cplx> nu, double length = 1.0,
                                      double collar = 0.05) {
    starweyl::EdgeModel e;
    e.order = order;
    e.length = length;
    e.collar = collar;
    e.nu = std::move(nu);
    e.potentials.assign(order - 1, starweyl::CollaredPolynomial());
    return e;
}

inline starweyl::PreparedEdge classical_edge(double length = 1.0, double collar = 0.05) {
    return starweyl::prepare_edge(plain_edge(2, {0.0}, length, collar));
}

// Three unit edges, y'' = lambda y, continuity and Kirchhoff at the centre.
inline starweyl::GraphModel classical_star(int p = 3, double collar = 0.05) {
    std::vector<starweyl::EdgeModel> edges(p, plain_edge(2, {0.0}, 1.0, collar));
    return starweyl::GraphModel(2, edges, std::vector<starweyl::LinearForms>(p, starweyl::LinearForms::identity(2)));
}

inline double rel_err(cplx a, cplx b) {
    const double scale = std::max(std::abs(b), 1e-300);
    return std::abs(a - b) / scale;
}

// Indicial polynomial in the falling-factorial form, evaluated directly.
inline cplx falling_delta(const std::vector<cplx>& nu, cplx xi) {
    const int n = static_cast<int>(nu.size()) + 1;
    cplx total{};
    cplx ff = 1.0;
    for (int mu = 0; mu <= n; ++mu) {
        const cplx coeff = mu < n - 1 ? nu[mu] : (mu == n ? cplx(1.0) : cplx(0.0));
        total += coeff * ff;
        ff *= xi - static_cast<double>(mu);
    }
    return total;
}

// Random admissible edge of the given order; retries until the indicial
// roots pass every exclusion test.
inline starweyl::PreparedEdge random_edge(std::mt19937& rng, int order, double collar) {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> len(0.5, 1.0);
    for (;;) {
        std::vector<cplx> nu;
        for (int mu = 0; mu < order - 1; ++mu)
            nu.emplace_back(coef(rng), 0.5 * coef(rng));
        starweyl::EdgeModel e = plain_edge(order, nu, len(rng), collar);
        const double end = collar + 0.2 * (e.length - collar);
        for (int mu = 0; mu < order - 1; ++mu)
            e.potentials[mu] = starweyl::CollaredPolynomial(end, {cplx(coef(rng), coef(rng)), cplx(coef(rng))});
        try {
            return starweyl::prepare_edge(e);
        } catch (const starweyl::AdmissibilityError&) {
        }
    }
}

inline cplx random_lambda(std::mt19937& rng, double max_abs) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::polar(max_abs * std::sqrt(u(rng)), 2.0 * M_PI * u(rng));
}

}  // namespace testing
