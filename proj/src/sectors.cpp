#include "starweyl/sectors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "starweyl/errors.hpp"

namespace starweyl {

namespace {

double principal_arg(cplx z) {
    const double a = std::arg(z);
    // std::arg maps the negative real axis with a -0.0 imaginary part to -pi.
    return a <= -std::numbers::pi ? std::numbers::pi : a;
}

}  // namespace

SectorFrame sector_frame(int order, double arg_rho) {
    constexpr double pi = std::numbers::pi;
    if (order < 1)
        throw Error(ErrorCode::InvalidArgument, "sector_frame: order must be positive");
    if (!(arg_rho > -pi && arg_rho <= pi))
        throw Error(ErrorCode::InvalidArgument, "sector_frame: arg rho must lie in (-pi, pi]");

    const cplx rho = std::polar(1.0, arg_rho);
    std::vector<double> key(order);
    for (int m = 0; m < order; ++m)
        key[m] = (rho * std::polar(1.0, 2.0 * pi * m / order)).real();

    SectorFrame frame;
    frame.order = order;
    frame.arg_rho = arg_rho;
    frame.sector = static_cast<int>(std::floor(arg_rho * order / pi));
    frame.eta.resize(order);
    std::iota(frame.eta.begin(), frame.eta.end(), 0);
    std::sort(frame.eta.begin(), frame.eta.end(), [&](int a, int b) { return key[a] < key[b]; });

    for (int k = 0; k + 1 < order; ++k) {
        if (key[frame.eta[k + 1]] - key[frame.eta[k]] <= kSectorTieTolerance) {
            std::ostringstream msg;
            msg << "arg rho = " << arg_rho << " lies on a sector boundary";
            throw Error(ErrorCode::BoundaryArgument, msg.str());
        }
    }
    frame.roots.resize(order);
    for (int k = 0; k < order; ++k)
        frame.roots[k] = std::polar(1.0, 2.0 * pi * frame.eta[k] / order);
    return frame;
}

cplx complex_power(cplx rho, cplx mu) {
    if (rho == cplx{})
        throw Error(ErrorCode::ZeroBase, "complex_power: zero base");
    const cplx log_rho{std::log(std::abs(rho)), principal_arg(rho)};
    return std::exp(mu * log_rho);
}

cplx root_power(const SectorFrame& frame, int k, cplx mu) {
    const cplx i{0.0, 1.0};
    return std::exp(2.0 * std::numbers::pi * i * mu * static_cast<double>(frame.eta[k - 1]) /
                    static_cast<double>(frame.order));
}

OmegaConstants omega_constants(const SectorFrame& frame, const ExponentSet& exps) {
    const int n = frame.order;
    OmegaConstants out;
    out.big.assign(n + 1, cplx{});
    out.small.assign(n, cplx{});
    out.big[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
        Eigen::MatrixXcd m(k, k);
        for (int l = 1; l <= k; ++l)
            for (int mu = 1; mu <= k; ++mu)
                m(l - 1, mu - 1) = root_power(frame, l, exps.roots[mu - 1]);
        out.big[k] = m.determinant();
        if (std::abs(out.big[k]) < kOmegaFloor) {
            std::ostringstream msg;
            msg << "Omega_" << k << " vanishes for this sector and exponent set";
            throw Error(ErrorCode::DegenerateOmega, msg.str());
        }
        out.small[k - 1] = out.big[k - 1] / out.big[k];
    }
    return out;
}

}  // namespace starweyl
