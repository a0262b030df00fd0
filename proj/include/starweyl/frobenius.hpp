#pragma once

#include <vector>

#include "starweyl/basis.hpp"
#include "starweyl/exponents.hpp"

namespace starweyl {

struct SeriesEvaluation {
    int edge = 0;
    int k = 0;
    int derivative = 0;
    double x = 0.0;
    cplx lambda;
    cplx value;
    int terms_used = 0;
    double truncation = 0.0;
};

struct SeriesOptions {
    int max_terms = 300;
    // When positive, sum exactly this many terms past the leading one and
    // skip the stopping rule.
    int fixed_terms = 0;
};

inline constexpr double kResonanceFloor = 1e-13;
inline constexpr double kCollarWronskianLimit = 1e-6;

/// c_{k,0..terms}; k is 1-based.
std::vector<cplx> series_coefficients(const IndicialPolynomial& p, const ExponentSet& exps, int k,
                                      int terms);

/// d^deriv/dx^deriv of C_k(x, lambda); deriv may go up to n for residual checks.
SeriesEvaluation eval_C(const PreparedEdge& edge, int k, int deriv, double x, cplx lambda,
                        const SeriesOptions& options = {});

/// Rows k, columns nu of C_k^{(nu)}(x0, lambda).
BasisValues basis_at_collar(const PreparedEdge& edge, cplx lambda);

}  // namespace starweyl
