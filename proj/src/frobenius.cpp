#include "starweyl/frobenius.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "starweyl/errors.hpp"

namespace starweyl {

namespace {

cplx falling_factorial(cplx a, int count) {
    cplx out = 1.0;
    for (int i = 0; i < count; ++i)
        out *= a - static_cast<double>(i);
    return out;
}

cplx next_coefficient(const IndicialPolynomial& p, cplx xi, int mu, cplx previous) {
    const cplx d = indicial_eval(p, xi + static_cast<double>(mu * p.order));
    if (std::abs(d) < kResonanceFloor) {
        std::ostringstream msg;
        msg << "indicial polynomial vanishes at " << xi << " + " << mu << "*" << p.order;
        throw Error(ErrorCode::ResonantExponent, msg.str());
    }
    return previous / d;
}

}  // namespace

std::vector<cplx> series_coefficients(const IndicialPolynomial& p, const ExponentSet& exps, int k,
                                      int terms) {
    const cplx xi = exps.roots.at(k - 1);
    std::vector<cplx> c(terms + 1);
    c[0] = exps.leading.at(k - 1);
    for (int mu = 1; mu <= terms; ++mu)
        c[mu] = next_coefficient(p, xi, mu, c[mu - 1]);
    return c;
}

SeriesEvaluation eval_C(const PreparedEdge& pe, int k, int deriv, double x, cplx lambda,
                        const SeriesOptions& options) {
    if (!(x > 0.0))
        throw Error(ErrorCode::InvalidArgument, "eval_C: x must be positive");
    const int n = pe.edge.order;
    if (deriv < 0 || deriv > n)
        throw Error(ErrorCode::InvalidArgument, "eval_C: derivative order out of range");

    const cplx xi = pe.exponents.roots.at(k - 1);
    const cplx base = std::exp((xi - static_cast<double>(deriv)) * std::log(x));
    const cplx step = lambda * std::pow(x, n);

    SeriesEvaluation out;
    out.edge = pe.edge.index;
    out.k = k;
    out.derivative = deriv;
    out.x = x;
    out.lambda = lambda;

    cplx coeff = pe.exponents.leading.at(k - 1);
    cplx power = 1.0;  // (lambda x^n)^mu
    cplx sum{};
    double smallest = std::numeric_limits<double>::infinity();
    int quiet = 0;
    double tail = 0.0;

    const int cap = options.fixed_terms > 0 ? options.fixed_terms : options.max_terms;
    for (int mu = 0; mu <= cap; ++mu) {
        if (mu > 0) {
            coeff = next_coefficient(pe.indicial, xi, mu, coeff);
            power *= step;
        }
        const cplx term =
            coeff * power * falling_factorial(xi + static_cast<double>(n * mu), deriv) * base;
        sum += term;
        const double mag = std::abs(term);
        if (mag > 0.0)
            smallest = std::min(smallest, mag);
        if (options.fixed_terms > 0) {
            out.terms_used = mu;
            out.truncation = mag;
            continue;
        }
        const double scale = std::abs(sum) + (std::isfinite(smallest) ? smallest : 0.0);
        if (mag <= 1e-16 * scale) {
            ++quiet;
            tail += mag;
        } else {
            quiet = 0;
            tail = 0.0;
        }
        if (quiet == 3) {
            out.value = sum;
            out.terms_used = mu;
            out.truncation = tail;
            return out;
        }
    }
    if (options.fixed_terms > 0) {
        out.value = sum;
        return out;
    }
    throw Error(ErrorCode::TruncationFailure, "eval_C: series did not converge within the term cap");
}

BasisValues basis_at_collar(const PreparedEdge& pe, cplx lambda) {
    const int n = pe.edge.order;
    BasisValues out;
    out.edge = pe.edge.index;
    out.lambda = lambda;
    out.x = pe.edge.collar;
    out.values.resize(n, n);
    for (int k = 1; k <= n; ++k)
        for (int nu = 0; nu < n; ++nu)
            out.values(k - 1, nu) = eval_C(pe, k, nu, out.x, lambda).value;
    out.wronskian_drift = std::abs(out.values.determinant() - 1.0);
    if (out.wronskian_drift > kCollarWronskianLimit) {
        std::ostringstream msg;
        msg << "edge " << pe.edge.index << ": collar Wronskian deviates from 1 by "
            << out.wronskian_drift;
        throw Error(ErrorCode::WronskianDeviation, msg.str());
    }
    return out;
}

}  // namespace starweyl
