#include "starweyl/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "starweyl/errors.hpp"

namespace starweyl {

CollaredPolynomial::CollaredPolynomial(double collar_end, std::vector<cplx> coeffs)
    : collar_end_(collar_end), coeffs_(std::move(coeffs)) {
    if (!(collar_end_ >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "collar end must be non-negative");
}

bool CollaredPolynomial::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx a) { return a == cplx{}; });
}

cplx CollaredPolynomial::derivative(double x, int order) const {
    if (x <= collar_end_ || coeffs_.empty())
        return {};
    const double t = x - collar_end_;
    const int deg = static_cast<int>(coeffs_.size()) - 1;
    cplx acc{};
    for (int i = deg; i >= order; --i) {
        double ff = 1.0;
        for (int m = 0; m < order; ++m)
            ff *= static_cast<double>(i - m);
        acc = acc * t + coeffs_[i] * ff;
    }
    return acc;
}

void EdgeModel::validate() const {
    std::ostringstream msg;
    msg << "edge " << index << ": ";
    if (order < 2)
        throw Error(ErrorCode::InvalidArgument, msg.str() + "order must be at least 2");
    if (!(length > 0.0))
        throw Error(ErrorCode::InvalidArgument, msg.str() + "length must be positive");
    if (!(collar > 0.0 && collar < length))
        throw Error(ErrorCode::InvalidArgument, msg.str() + "collar must lie in (0, length)");
    if (static_cast<int>(nu.size()) != order - 1)
        throw Error(ErrorCode::InvalidArgument, msg.str() + "expected order-1 singular coefficients");
    if (static_cast<int>(potentials.size()) != order - 1)
        throw Error(ErrorCode::InvalidArgument, msg.str() + "expected order-1 potential components");
    for (const auto& v : nu)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorCode::InvalidArgument, msg.str() + "singular coefficient not finite");
    for (std::size_t mu = 0; mu < potentials.size(); ++mu) {
        if (!potentials[mu].is_zero() && potentials[mu].collar_end() < collar)
            throw Error(ErrorCode::InvalidArgument,
                        msg.str() + "potential q_" + std::to_string(mu) +
                            " does not vanish on the collar");
    }
}

cplx EdgeModel::coefficient(int mu, double x) const {
    return nu[mu] / std::pow(x, order - mu) + potentials[mu](x);
}

IndicialPolynomial build_indicial(int order, std::span<const cplx> nu) {
    if (order < 2 || static_cast<int>(nu.size()) != order - 1)
        throw Error(ErrorCode::InvalidArgument, "build_indicial: need order-1 coefficients");
    IndicialPolynomial p;
    p.order = order;
    p.falling.assign(nu.begin(), nu.end());
    p.falling.push_back(0.0);  // nu_{n-1}
    p.falling.push_back(1.0);  // nu_n

    p.monomial.assign(order + 1, cplx{});
    std::vector<cplx> ff{1.0};  // prod_{k<mu} (xi - k)
    for (int mu = 0; mu <= order; ++mu) {
        for (std::size_t i = 0; i < ff.size(); ++i)
            p.monomial[i] += p.falling[mu] * ff[i];
        std::vector<cplx> next(ff.size() + 1, cplx{});
        for (std::size_t i = 0; i < ff.size(); ++i) {
            next[i + 1] += ff[i];
            next[i] -= static_cast<double>(mu) * ff[i];
        }
        ff = std::move(next);
    }
    return p;
}

IndicialPolynomial build_indicial(const EdgeModel& edge) {
    return build_indicial(edge.order, edge.nu);
}

cplx indicial_eval(const IndicialPolynomial& p, cplx xi) {
    cplx acc{};
    for (auto it = p.monomial.rbegin(); it != p.monomial.rend(); ++it)
        acc = acc * xi + *it;
    return acc;
}

std::vector<cplx> polynomial_roots(std::span<const cplx> monic, double tol, int max_iter) {
    const int n = static_cast<int>(monic.size()) - 1;
    if (n < 1)
        return {};
    auto eval = [&](cplx z) {
        cplx acc{};
        for (int i = n; i >= 0; --i)
            acc = acc * z + monic[i];
        return acc;
    };

    double radius = 0.0;
    for (int i = 0; i < n; ++i)
        radius = std::max(radius, std::abs(monic[i]));
    radius += 1.0;

    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i)
        z[i] = std::polar(radius, 2.0 * std::numbers::pi * i / n + 0.4);

    for (int iter = 0; iter < max_iter; ++iter) {
        double biggest = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i)
                    denom *= z[i] - z[j];
            if (denom == cplx{})
                denom = 1e-300;
            const cplx step = eval(z[i]) / denom;
            z[i] -= step;
            biggest = std::max(biggest, std::abs(step) / std::max(1.0, std::abs(z[i])));
        }
        if (biggest <= tol)
            return z;
    }
    throw Error(ErrorCode::NonConvergence, "Durand-Kerner iteration did not converge");
}

void check_admissible(std::span<const cplx> roots, int order, double tol) {
    const int n = static_cast<int>(roots.size());
    for (int k = 0; k + 1 < n; ++k) {
        if (roots[k + 1].real() - roots[k].real() < tol) {
            std::ostringstream msg;
            msg << "exponents " << roots[k] << " and " << roots[k + 1] << " have colliding real parts";
            throw AdmissibilityError(AdmissibilityReason::RealPartCollision, msg.str());
        }
    }
    for (int k = 0; k < n; ++k) {
        for (int m = k + 1; m < n; ++m) {
            const cplx d = roots[m] - roots[k];
            const double nearest = order * std::round(d.real() / order);
            if (std::abs(d - nearest) < tol) {
                std::ostringstream msg;
                msg << "exponents " << roots[k] << " and " << roots[m]
                    << " differ by a multiple of " << order;
                throw AdmissibilityError(AdmissibilityReason::DifferenceMultipleOfN, msg.str());
            }
        }
    }
    for (int k = 0; k < n; ++k) {
        for (int m = 0; m <= order - 3; ++m) {
            if (std::abs(roots[k] - static_cast<double>(m)) < tol) {
                std::ostringstream msg;
                msg << "exponent " << roots[k] << " equals the forbidden integer " << m;
                throw AdmissibilityError(AdmissibilityReason::ForbiddenIntegerExponent, msg.str());
            }
        }
    }
}

ExponentSet solve_exponents(const IndicialPolynomial& p, LeadingConvention convention) {
    const int n = p.order;
    ExponentSet out;
    out.roots = polynomial_roots(p.monomial);
    std::sort(out.roots.begin(), out.roots.end(),
              [](cplx a, cplx b) { return a.real() < b.real(); });

    for (cplx xi : out.roots) {
        const double bound = 1e-10 * std::max(1.0, std::pow(std::abs(xi), n));
        if (std::abs(indicial_eval(p, xi)) > bound)
            throw Error(ErrorCode::NonConvergence, "indicial root residual above bound");
    }
    check_admissible(out.roots, n);

    out.vandermonde = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out.vandermonde *= out.roots[j] - out.roots[i];

    out.leading.assign(n, 1.0);
    if (convention == LeadingConvention::FirstAbsorbsVandermonde)
        out.leading.front() = 1.0 / out.vandermonde;
    else
        out.leading.back() = 1.0 / out.vandermonde;

    out.theta = (n - 1) - (out.roots.back() - out.roots.front()).real();
    return out;
}

PreparedEdge prepare_edge(EdgeModel edge, LeadingConvention convention) {
    edge.validate();
    PreparedEdge out;
    out.indicial = build_indicial(edge);
    try {
        out.exponents = solve_exponents(out.indicial, convention);
    } catch (const AdmissibilityError& e) {
        throw AdmissibilityError(e.reason(),
                                 "edge " + std::to_string(edge.index) + ": " + e.what());
    }
    out.edge = std::move(edge);
    return out;
}

}  // namespace starweyl
