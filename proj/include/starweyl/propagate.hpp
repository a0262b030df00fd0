#pragma once

#include <span>
#include <vector>

#include "starweyl/basis.hpp"
#include "starweyl/exponents.hpp"

namespace starweyl {

struct IntegrationSettings {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 200000;
    double initial_step_fraction = 1e-3;

    void validate() const;
};

inline constexpr double kWronskianDriftLimit = 1e-7;

/// Derivative of the state (y, y', ..., y^{(n-1)}) for the edge equation.
Eigen::VectorXcd companion_apply(const EdgeModel& edge, cplx lambda, double x,
                                 const Eigen::VectorXcd& v);

/// Integrates every row of `rows` (each a state vector) from x_from to x_to
/// with a shared adaptive step sequence; x_to < x_from integrates backward.
/// Values at the intermediate `stops` (ordered along the direction of travel)
/// are appended to `at_stops` when it is non-null.
Eigen::MatrixXcd propagate_rows(const EdgeModel& edge, cplx lambda, double x_from, double x_to,
                                Eigen::MatrixXcd rows, const IntegrationSettings& settings,
                                std::span<const double> stops = {},
                                std::vector<Eigen::MatrixXcd>* at_stops = nullptr);

/// S-basis at x = l, started from the exact collar series.
BasisValues integrate_basis(const PreparedEdge& edge, cplx lambda,
                            const IntegrationSettings& settings = {});

/// S-basis at each point of a strictly increasing mesh inside [x0, l].
std::vector<BasisValues> integrate_dense(const PreparedEdge& edge, cplx lambda,
                                         std::span<const double> mesh,
                                         const IntegrationSettings& settings = {});

}  // namespace starweyl
