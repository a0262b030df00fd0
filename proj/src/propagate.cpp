#include "starweyl/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "starweyl/errors.hpp"
#include "starweyl/frobenius.hpp"

namespace starweyl {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Local error allowance as a fraction of the requested tolerances, so the
// error accumulated over a few hundred steps stays near the request.
constexpr double kLocalTolerance = 1e-2;

// Row-wise companion derivative: d/dx Y = Y A(x)^T.
void rhs(const EdgeModel& edge, cplx lambda, double x, const Eigen::MatrixXcd& y,
         Eigen::MatrixXcd& dy) {
    const int n = edge.order;
    dy.resize(y.rows(), n);
    for (int i = 0; i + 1 < n; ++i)
        dy.col(i) = y.col(i + 1);
    dy.col(n - 1) = lambda * y.col(0);
    for (int mu = 0; mu <= n - 2; ++mu)
        dy.col(n - 1) -= edge.coefficient(mu, x) * y.col(mu);
}

double error_ratio(const Eigen::MatrixXcd& err, const Eigen::MatrixXcd& y0,
                   const Eigen::MatrixXcd& y1, const IntegrationSettings& s) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale =
            s.atol + s.rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
        worst = std::max(worst, std::abs(err.data()[i]) / scale);
    }
    return worst;
}

}  // namespace

void IntegrationSettings::validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0) || max_steps <= 0 || !(initial_step_fraction > 0.0))
        throw Error(ErrorCode::InvalidArgument, "integration settings must be positive");
}

Eigen::VectorXcd companion_apply(const EdgeModel& edge, cplx lambda, double x,
                                 const Eigen::VectorXcd& v) {
    Eigen::MatrixXcd row = v.transpose();
    Eigen::MatrixXcd out;
    rhs(edge, lambda, x, row, out);
    return out.transpose();
}

Eigen::MatrixXcd propagate_rows(const EdgeModel& edge, cplx lambda, double x_from, double x_to,
                                Eigen::MatrixXcd y, const IntegrationSettings& settings,
                                std::span<const double> stops,
                                std::vector<Eigen::MatrixXcd>* at_stops) {
    settings.validate();
    if (!(x_from > 0.0) || !(x_to > 0.0))
        throw Error(ErrorCode::InvalidArgument, "propagate_rows: endpoints must be positive");
    const double dir = x_to >= x_from ? 1.0 : -1.0;

    std::vector<double> targets(stops.begin(), stops.end());
    targets.push_back(x_to);

    double x = x_from;
    double h = settings.initial_step_fraction * std::max(std::abs(x_to - x_from), 1e-12);
    long steps = 0;
    Eigen::MatrixXcd k1, k2, k3, k4, k5, k6, k7, tmp, y5;
    rhs(edge, lambda, x, y, k1);

    for (double target : targets) {
        while (dir * (target - x) > 0.0) {
            if (++steps > settings.max_steps)
                throw Error(ErrorCode::StepLimitExceeded, "propagate_rows: step limit exceeded");
            bool last = false;
            double step = h;
            if (step >= std::abs(target - x)) {
                step = std::abs(target - x);
                last = true;
            }
            const double hs = dir * step;

            tmp = y + hs * (a21 * k1);
            rhs(edge, lambda, x + c2 * hs, tmp, k2);
            tmp = y + hs * (a31 * k1 + a32 * k2);
            rhs(edge, lambda, x + c3 * hs, tmp, k3);
            tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(edge, lambda, x + c4 * hs, tmp, k4);
            tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(edge, lambda, x + c5 * hs, tmp, k5);
            tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(edge, lambda, x + hs, tmp, k6);
            y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const double x_new = last ? target : x + hs;
            rhs(edge, lambda, x_new, y5, k7);
            tmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double ratio = error_ratio(tmp, y, y5, settings) / kLocalTolerance;
            if (!std::isfinite(ratio))
                throw Error(ErrorCode::StepLimitExceeded, "propagate_rows: non-finite state");
            if (ratio <= 1.0) {
                x = x_new;
                y = y5;
                k1 = k7;
                const double grow = ratio == 0.0 ? 5.0 : 0.9 * std::pow(ratio, -0.2);
                if (!last)
                    h = step * std::clamp(grow, 0.2, 5.0);
            } else {
                h = step * std::max(0.2, 0.9 * std::pow(ratio, -0.2));
            }
            if (h < 1e-14 * std::max(1.0, std::abs(x)))
                throw Error(ErrorCode::StepLimitExceeded, "propagate_rows: step size underflow");
        }
        if (at_stops != nullptr && target != x_to)
            at_stops->push_back(y);
    }
    return y;
}

namespace {

void check_drift(BasisValues& bv) {
    bv.wronskian_drift = std::abs(bv.values.determinant() - 1.0);
    if (!(bv.wronskian_drift <= kWronskianDriftLimit)) {
        std::ostringstream msg;
        msg << "edge " << bv.edge << ": Wronskian drift " << bv.wronskian_drift << " at x = " << bv.x
            << ", lambda = " << bv.lambda;
        throw Error(ErrorCode::WronskianDrift, msg.str());
    }
}

}  // namespace

BasisValues integrate_basis(const PreparedEdge& pe, cplx lambda, const IntegrationSettings& settings) {
    const BasisValues start = basis_at_collar(pe, lambda);
    BasisValues out;
    out.edge = pe.edge.index;
    out.lambda = lambda;
    out.x = pe.edge.length;
    out.values = propagate_rows(pe.edge, lambda, pe.edge.collar, pe.edge.length, start.values, settings);
    check_drift(out);
    return out;
}

std::vector<BasisValues> integrate_dense(const PreparedEdge& pe, cplx lambda,
                                         std::span<const double> mesh,
                                         const IntegrationSettings& settings) {
    std::vector<BasisValues> out;
    if (mesh.empty())
        return out;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (mesh[i] < pe.edge.collar || mesh[i] > pe.edge.length ||
            (i > 0 && !(mesh[i] > mesh[i - 1])))
            throw Error(ErrorCode::InvalidArgument,
                        "integrate_dense: mesh must be strictly increasing inside [x0, l]");
    }
    const BasisValues start = basis_at_collar(pe, lambda);
    std::vector<Eigen::MatrixXcd> states;
    if (mesh.back() == pe.edge.collar) {
        states.push_back(start.values);
    } else {
        Eigen::MatrixXcd last =
            propagate_rows(pe.edge, lambda, pe.edge.collar, mesh.back(), start.values, settings,
                           mesh.first(mesh.size() - 1), &states);
        states.push_back(std::move(last));
    }
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        BasisValues bv;
        bv.edge = pe.edge.index;
        bv.lambda = lambda;
        bv.x = mesh[i];
        bv.values = states[i];
        check_drift(bv);
        out.push_back(std::move(bv));
    }
    return out;
}

}  // namespace starweyl
