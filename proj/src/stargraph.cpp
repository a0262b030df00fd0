#include "starweyl/stargraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "starweyl/errors.hpp"
#include "starweyl/frobenius.hpp"
#include "starweyl/sectors.hpp"

namespace starweyl {

LinearForms LinearForms::identity(int order) {
    LinearForms f;
    f.rows.resize(order);
    for (int nu = 0; nu < order; ++nu) {
        f.rows[nu].assign(nu + 1, cplx{});
        f.rows[nu][nu] = 1.0;
    }
    return f;
}

cplx eval_Uform(const LinearForms& forms, std::span<const cplx> values, int nu) {
    cplx acc{};
    for (int mu = 0; mu <= nu; ++mu)
        acc += forms.at(nu, mu) * values[mu];
    return acc;
}

std::vector<cplx> invert_Uchain(const LinearForms& forms, std::span<const cplx> u_values) {
    std::vector<cplx> y(u_values.size());
    for (std::size_t nu = 0; nu < u_values.size(); ++nu) {
        cplx acc = u_values[nu];
        for (std::size_t mu = 0; mu < nu; ++mu)
            acc -= forms.at(static_cast<int>(nu), static_cast<int>(mu)) * y[mu];
        y[nu] = acc / forms.at(static_cast<int>(nu), static_cast<int>(nu));
    }
    return y;
}

namespace {

cplx uform_row(const LinearForms& forms, const Eigen::MatrixXcd& w, int row, int nu) {
    cplx acc{};
    for (int mu = 0; mu <= nu; ++mu)
        acc += forms.at(nu, mu) * w(row, mu);
    return acc;
}

}  // namespace

GraphModel::GraphModel(int order, std::vector<EdgeModel> edges, std::vector<LinearForms> forms,
                       LeadingConvention convention)
    : order_(order), convention_(convention), forms_(std::move(forms)) {
    if (order < 2)
        throw Error(ErrorCode::InvalidArgument, "graph order must be at least 2");
    if (edges.size() < 2)
        throw Error(ErrorCode::InvalidArgument, "a star graph needs at least two edges");
    if (forms_.size() != edges.size())
        throw Error(ErrorCode::InvalidArgument, "one set of linear forms per edge is required");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto& e = edges[i];
        e.index = static_cast<int>(i) + 1;
        if (e.order != order)
            throw Error(ErrorCode::InvalidArgument,
                        "edge " + std::to_string(e.index) + " has a different order");
        const auto& f = forms_[i];
        if (f.order() != order)
            throw Error(ErrorCode::InvalidArgument,
                        "edge " + std::to_string(e.index) + ": linear forms need " +
                            std::to_string(order) + " rows");
        for (int nu = 0; nu < order; ++nu) {
            if (static_cast<int>(f.rows[nu].size()) != nu + 1)
                throw Error(ErrorCode::InvalidArgument,
                            "edge " + std::to_string(e.index) + ": gamma row " +
                                std::to_string(nu) + " must have " + std::to_string(nu + 1) +
                                " entries");
            if (f.at(nu, nu) == cplx{})
                throw Error(ErrorCode::InvalidArgument,
                            "edge " + std::to_string(e.index) + ": gamma[" + std::to_string(nu) +
                                "][" + std::to_string(nu) + "] must be nonzero");
        }
        edges_.push_back(prepare_edge(std::move(e), convention));
    }
}

GraphModel GraphModel::without_potential(int j) const {
    std::vector<EdgeModel> edges;
    for (const auto& pe : edges_)
        edges.push_back(pe.edge);
    auto& e = edges.at(j - 1);
    for (auto& q : e.potentials)
        q = CollaredPolynomial(e.collar, {});
    return GraphModel(order_, std::move(edges), forms_, convention_);
}

const Eigen::MatrixXcd& GraphBasis::at(int j) const {
    const auto& e = edges.at(j - 1);
    if (!e)
        throw Error(ErrorCode::InvalidArgument,
                    "basis for edge " + std::to_string(j) + " was not computed");
    return e->values;
}

GraphBasis graph_basis(const GraphModel& model, cplx lambda, const IntegrationSettings& settings,
                       int skip_edge) {
    GraphBasis out;
    out.lambda = lambda;
    out.edges.resize(model.edge_count());
    for (int j = 1; j <= model.edge_count(); ++j)
        if (j != skip_edge)
            out.edges[j - 1] = integrate_basis(model.edge(j), lambda, settings);
    return out;
}

bool WeylRecord::near_pole() const {
    return std::any_of(rows.begin(), rows.end(), [](const WeylRow& r) { return r.near_pole; });
}

Eigen::MatrixXcd WeylRecord::matrix() const {
    const int n = static_cast<int>(rows.size()) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
    for (const auto& row : rows)
        for (int mu = row.k + 1; mu <= n; ++mu)
            m(row.k - 1, mu - 1) = row.own[mu - row.k - 1];
    return m;
}

MatchingSystem assemble_matching(const GraphModel& model, const GraphBasis& basis, int s, int k) {
    const int n = model.order();
    const int p = model.edge_count();
    if (s < 1 || s > p || k < 1 || k > n - 1)
        throw Error(ErrorCode::InvalidArgument, "assemble_matching: s or k out of range");

    const int unknowns = (n - k) + (p - 1) * k;
    const int equations = (p - 1) * k + (n - k);
    if (unknowns != equations)
        throw Error(ErrorCode::InvalidArgument, "matching system is not square");

    std::vector<int> offset(p + 1, -1);
    int next = n - k;
    for (int j = 1; j <= p; ++j) {
        if (j == s)
            continue;
        offset[j] = next;
        next += k;
    }

    MatchingSystem sys;
    sys.matrix = Eigen::MatrixXcd::Zero(equations, unknowns);
    sys.rhs = Eigen::VectorXcd::Zero(equations);

    // Adds sign * U_{j,nu}(psi_{skj}) to equation `row`.
    auto add_term = [&](int row, int j, int nu, double sign) {
        const auto& w = basis.at(j);
        const auto& f = model.forms(j);
        if (j == s) {
            sys.rhs(row) -= sign * uform_row(f, w, k - 1, nu);
            for (int mu = k + 1; mu <= n; ++mu)
                sys.matrix(row, mu - k - 1) += sign * uform_row(f, w, mu - 1, nu);
        } else {
            for (int mu = n - k + 1; mu <= n; ++mu)
                sys.matrix(row, offset[j] + mu - (n - k + 1)) += sign * uform_row(f, w, mu - 1, nu);
        }
    };

    int row = 0;
    for (int j = 2; j <= p; ++j) {
        for (int nu = 0; nu < k; ++nu, ++row) {
            add_term(row, 1, nu, 1.0);
            add_term(row, j, nu, -1.0);
        }
    }
    for (int nu = k; nu < n; ++nu, ++row)
        for (int j = 1; j <= p; ++j)
            add_term(row, j, nu, 1.0);
    return sys;
}

WeylRow solve_weyl(const GraphModel& model, const GraphBasis& basis, int s, int k) {
    const int n = model.order();
    const int p = model.edge_count();
    const MatchingSystem sys = assemble_matching(model, basis, s, k);

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
    WeylRow row;
    row.k = k;
    row.delta = lu.determinant();
    const double rcond = lu.rcond();
    const Eigen::VectorXcd x = lu.solve(sys.rhs);
    if (row.delta == cplx{} || rcond == 0.0 || !x.allFinite()) {
        std::ostringstream msg;
        msg << "matching system for s = " << s << ", k = " << k << " is singular at lambda = "
            << basis.lambda;
        throw Error(ErrorCode::SingularSystem, msg.str());
    }
    row.condition = 1.0 / rcond;

    double hadamard = 1.0;
    for (Eigen::Index i = 0; i < sys.matrix.rows(); ++i)
        hadamard *= sys.matrix.row(i).norm();
    row.near_pole = row.condition > kNearPoleCondition || std::abs(row.delta) < kNearPoleHadamard * hadamard;

    const double scale = sys.matrix.cwiseAbs().rowwise().sum().maxCoeff() * x.cwiseAbs().maxCoeff() +
                         sys.rhs.cwiseAbs().maxCoeff();
    row.residual = (sys.matrix * x - sys.rhs).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);

    row.own.assign(x.data(), x.data() + (n - k));
    row.other.resize(p);
    int next = n - k;
    for (int j = 1; j <= p; ++j) {
        if (j == s)
            continue;
        row.other[j - 1].assign(x.data() + next, x.data() + next + k);
        next += k;
    }
    return row;
}

WeylRecord solve_weyl_record(const GraphModel& model, const GraphBasis& basis, int s) {
    WeylRecord rec;
    rec.s = s;
    rec.lambda = basis.lambda;
    for (int k = 1; k < model.order(); ++k)
        rec.rows.push_back(solve_weyl(model, basis, s, k));
    return rec;
}

Eigen::MatrixXcd weyl_matrix(const GraphModel& model, int s, cplx lambda,
                             const IntegrationSettings& settings) {
    return solve_weyl_record(model, graph_basis(model, lambda, settings), s).matrix();
}

cplx char_function(const GraphModel& model, const GraphBasis& basis, int s, int k) {
    return assemble_matching(model, basis, s, k).matrix.determinant();
}

cplx char_function(const GraphModel& model, int s, int k, cplx lambda,
                   const IntegrationSettings& settings) {
    return char_function(model, graph_basis(model, lambda, settings), s, k);
}

std::vector<cplx> forward_psi(const GraphModel& model, const GraphBasis& basis, const WeylRow& row,
                              int s, int j) {
    const int n = model.order();
    const int k = row.k;
    const auto& w = basis.at(j);
    Eigen::RowVectorXcd psi;
    if (j == s) {
        psi = w.row(k - 1);
        for (int mu = k + 1; mu <= n; ++mu)
            psi += row.own[mu - k - 1] * w.row(mu - 1);
    } else {
        psi = Eigen::RowVectorXcd::Zero(n);
        for (int mu = n - k + 1; mu <= n; ++mu)
            psi += row.other[j - 1][mu - (n - k + 1)] * w.row(mu - 1);
    }
    return {psi.data(), psi.data() + n};
}

namespace {
constexpr double kDirectSingularRcond = 1e-14;
}

InternalWeylMatrix direct_internal_weyl(const BasisValues& bv, int j) {
    const int n = static_cast<int>(bv.values.rows());
    InternalWeylMatrix out;
    out.j = j;
    out.lambda = bv.lambda;
    out.m = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k < n; ++k) {
        // phi_k = sum_{mu=n-k+1}^{n} a_mu S_mu with phi_k^{(nu)}(l) = delta_{k-1,nu}, nu < k.
        Eigen::MatrixXcd b(k, k);
        for (int nu = 0; nu < k; ++nu)
            for (int m = 0; m < k; ++m)
                b(nu, m) = bv.values(n - k + m, nu);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(k);
        e(k - 1) = 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b);
        const double rcond = lu.rcond();
        if (!(rcond > kDirectSingularRcond)) {
            std::ostringstream msg;
            msg << "internal Weyl system for edge " << j << ", k = " << k
                << " is singular at lambda = " << bv.lambda;
            throw Error(ErrorCode::SingularSystem, msg.str());
        }
        out.condition = std::max(out.condition, 1.0 / rcond);
        const Eigen::VectorXcd a = lu.solve(e);
        for (int nu = k; nu < n; ++nu) {
            cplx acc{};
            for (int m = 0; m < k; ++m)
                acc += a(m) * bv.values(n - k + m, nu);
            out.m(k - 1, nu) = acc;
        }
    }
    return out;
}

InternalWeylMatrix direct_internal_weyl(const GraphModel& model, int j, cplx lambda,
                                        const IntegrationSettings& settings) {
    return direct_internal_weyl(integrate_basis(model.edge(j), lambda, settings), j);
}

EigenScanResult eigen_scan(const GraphModel& model, int s, int k, double lambda_from,
                           double lambda_to, const EigenScanOptions& options,
                           const IntegrationSettings& settings) {
    if (options.grid_points < 3 || !(lambda_to > lambda_from))
        throw Error(ErrorCode::InvalidArgument, "eigen_scan: need an interval and >= 3 grid points");
    auto delta = [&](cplx lambda) { return char_function(model, s, k, lambda, settings); };

    const int g = options.grid_points;
    const double width = lambda_to - lambda_from;
    std::vector<double> grid(g), mag(g);
    for (int i = 0; i < g; ++i) {
        grid[i] = lambda_from + width * i / (g - 1);
        mag[i] = std::abs(delta(grid[i]));
    }

    EigenScanResult out;
    const double spacing = width / (g - 1);
    for (int i = 1; i + 1 < g; ++i) {
        if (!(mag[i] <= mag[i - 1] && mag[i] < mag[i + 1]))
            continue;
        EigenCandidate cand;
        cplx lambda = grid[i];
        cplx value = delta(lambda);
        for (cand.iterations = 0; cand.iterations < options.max_iterations; ++cand.iterations) {
            if (value == cplx{})
                break;
            const double h = 1e-6 * std::max(1.0, std::abs(lambda));
            const cplx slope = (delta(lambda + h) - delta(lambda - h)) / (2.0 * h);
            if (slope == cplx{})
                break;
            const cplx step = value / slope;
            lambda -= step;
            value = delta(lambda);
            if (std::abs(step) <= 1e-12 * std::max(1.0, std::abs(lambda)))
                break;
            if (std::abs(lambda - grid[i]) > 4.0 * spacing + 1.0)
                break;
        }
        cand.lambda = lambda;
        cand.residual = std::abs(value);
        const bool inside = lambda.real() >= lambda_from - spacing &&
                            lambda.real() <= lambda_to + spacing;
        cand.converged = cand.residual <= options.tolerance && inside;
        if (cand.converged) {
            const bool duplicate = std::any_of(
                out.eigenvalues.begin(), out.eigenvalues.end(), [&](const EigenCandidate& c) {
                    return std::abs(c.lambda - lambda) <= 1e-6 * std::max(1.0, std::abs(lambda));
                });
            if (!duplicate)
                out.eigenvalues.push_back(cand);
        } else {
            out.rejected.push_back(cand);
        }
    }
    return out;
}

namespace {

// Orthonormal basis (columns) for the span of the given rows.
Eigen::MatrixXcd row_span(const Eigen::MatrixXcd& rows) {
    Eigen::MatrixXcd t = rows.transpose();
    for (Eigen::Index c = 0; c < t.cols(); ++c)
        t.col(c) /= t.col(c).norm();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(t);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(t.rows(), t.cols());
}

cplx uform_vec(const LinearForms& f, const Eigen::VectorXcd& y, int nu) {
    cplx acc{};
    for (int mu = 0; mu <= nu; ++mu)
        acc += f.at(nu, mu) * y(mu);
    return acc;
}

}  // namespace

std::vector<double> asymptotic_check(const GraphModel& model, int s, int k, double arg_rho,
                                     std::span<const double> rho_abs, double x_probe,
                                     const IntegrationSettings& settings) {
    const int n = model.order();
    const int p = model.edge_count();
    const PreparedEdge& src = model.edge(s);
    if (k < 1 || k > n)
        throw Error(ErrorCode::InvalidArgument, "asymptotic_check: k out of range");
    if (!(x_probe > src.edge.collar && x_probe < src.edge.length))
        throw Error(ErrorCode::InvalidArgument, "asymptotic_check: probe must lie in (x0, l)");

    const SectorFrame frame = sector_frame(n, arg_rho);
    const OmegaConstants omega = omega_constants(frame, src.exponents);
    const cplx xi = src.exponents.roots[k - 1];
    const cplx rk = frame.roots[k - 1];

    std::vector<double> out;
    for (double r : rho_abs) {
        const cplx rho = std::polar(r, arg_rho);
        const cplx lambda = std::pow(rho, n);
        const Eigen::MatrixXcd collar_s = basis_at_collar(src, lambda).values;

        cplx psi_probe;
        if (k == n) {
            // psi_{sns} is S_{ns} itself; forward integration follows its growth.
            const Eigen::MatrixXcd y = propagate_rows(src.edge, lambda, src.edge.collar, x_probe,
                                                      collar_s.row(n - 1), settings);
            psi_probe = y(0, 0);
        } else {
            // Boundary data of the Weyl solution at the vertex, up to scale, from the
            // subspaces selected by the conditions at the boundary vertices.
            std::vector<Eigen::MatrixXcd> span(p + 1);
            for (int j = 1; j <= p; ++j) {
                const PreparedEdge& e = model.edge(j);
                const int first = j == s ? k : n - k + 1;
                if (j == s && k == 1) {
                    span[j] = Eigen::MatrixXcd::Identity(n, n);
                    continue;
                }
                const Eigen::MatrixXcd start = basis_at_collar(e, lambda).values;
                const Eigen::MatrixXcd at_l =
                    propagate_rows(e.edge, lambda, e.edge.collar, e.edge.length,
                                   start.bottomRows(n - first + 1), settings);
                span[j] = row_span(at_l);
            }
            std::vector<int> offset(p + 1, 0);
            int cols = 0;
            for (int j = 1; j <= p; ++j) {
                offset[j] = cols;
                cols += static_cast<int>(span[j].cols());
            }
            Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cols - 1, cols);
            auto add = [&](int row, int j, int nu, double sign) {
                const auto& f = model.forms(j);
                for (Eigen::Index c = 0; c < span[j].cols(); ++c)
                    a(row, offset[j] + c) += sign * uform_vec(f, span[j].col(c), nu);
            };
            int row = 0;
            for (int j = 2; j <= p; ++j)
                for (int nu = 0; nu < k; ++nu, ++row) {
                    add(row, 1, nu, 1.0);
                    add(row, j, nu, -1.0);
                }
            for (int nu = k; nu < n; ++nu, ++row)
                for (int j = 1; j <= p; ++j)
                    add(row, j, nu, 1.0);

            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
            const Eigen::VectorXcd coeff = svd.matrixV().col(cols - 1);
            const Eigen::VectorXcd ys =
                span[s] * coeff.segment(offset[s], span[s].cols());

            const double probe[] = {x_probe};
            std::vector<Eigen::MatrixXcd> at_probe;
            const Eigen::MatrixXcd y0 = propagate_rows(src.edge, lambda, src.edge.length,
                                                       src.edge.collar, ys.transpose(), settings,
                                                       probe, &at_probe);
            // y(x0) = sum_m a_m C_m(x0): the S_k coefficient fixes the normalization.
            const Eigen::VectorXcd amp = collar_s.transpose().partialPivLu().solve(y0.row(0).transpose());
            psi_probe = at_probe.front()(0, 0) / amp(k - 1);
        }
        const cplx scaled = psi_probe * complex_power(rho, xi) * std::exp(-rho * rk * x_probe) /
                            omega.small[k - 1];
        out.push_back(std::abs(scaled - 1.0));
    }
    return out;
}

}  // namespace starweyl
