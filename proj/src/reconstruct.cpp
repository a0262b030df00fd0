#include "starweyl/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "starweyl/errors.hpp"
#include "starweyl/parallel.hpp"

namespace starweyl {

bool PsiBoundaryData::complete() const {
    return !filled.empty() && std::all_of(filled.begin(), filled.end(), [](bool b) { return b; });
}

PsiBoundaryData step_edge_s(const Eigen::MatrixXcd& weyl, const Eigen::MatrixXcd& basis_s, int s, int k,
                            cplx lambda) {
    const int n = static_cast<int>(basis_s.rows());
    Eigen::RowVectorXcd psi = basis_s.row(k - 1);
    for (int mu = k + 1; mu <= n; ++mu)
        psi += weyl(k - 1, mu - 1) * basis_s.row(mu - 1);
    PsiBoundaryData out;
    out.s = s;
    out.k = k;
    out.j = s;
    out.lambda = lambda;
    out.values.assign(psi.data(), psi.data() + n);
    out.filled.assign(n, true);
    return out;
}

std::vector<PsiBoundaryData> propagate_matching(const GraphModel& model, const PsiBoundaryData& at_s) {
    const int n = model.order();
    const int k = at_s.k;
    const auto& fs = model.forms(at_s.s);
    std::vector<cplx> u(k);
    for (int nu = 0; nu < k; ++nu)
        u[nu] = eval_Uform(fs, at_s.values, nu);

    std::vector<PsiBoundaryData> out(model.edge_count());
    for (int j = 1; j <= model.edge_count(); ++j) {
        if (j == at_s.s) {
            out[j - 1] = at_s;
            continue;
        }
        PsiBoundaryData d;
        d.s = at_s.s;
        d.k = k;
        d.j = j;
        d.lambda = at_s.lambda;
        d.values.assign(n, cplx{});
        d.filled.assign(n, false);
        const auto y = invert_Uchain(model.forms(j), u);
        for (int nu = 0; nu < k; ++nu) {
            d.values[nu] = y[nu];
            d.filled[nu] = true;
        }
        out[j - 1] = std::move(d);
    }
    return out;
}

SigmaSolution solve_sigma(const PsiBoundaryData& partial, const Eigen::MatrixXcd& basis_j) {
    const int n = static_cast<int>(basis_j.rows());
    const int k = partial.k;
    Eigen::MatrixXcd b(k, k);
    Eigen::VectorXcd rhs(k);
    for (int nu = 0; nu < k; ++nu) {
        if (!partial.filled[nu])
            throw Error(ErrorCode::InvalidArgument, "solve_sigma: continuity data missing");
        rhs(nu) = partial.values[nu];
        for (int m = 0; m < k; ++m)
            b(nu, m) = basis_j(n - k + m, nu);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(b);
    double hadamard = 1.0;
    for (int r = 0; r < k; ++r)
        hadamard *= b.row(r).norm();
    const double rcond = lu.rcond();
    const cplx det = lu.determinant();
    SigmaSolution out;
    out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (out.condition > kSigmaConditionLimit || std::abs(det) < kDenominatorFloor * hadamard) {
        std::ostringstream msg;
        msg << "sigma system for s = " << partial.s << ", k = " << k << ", j = " << partial.j
            << " is singular at lambda = " << partial.lambda;
        throw Error(ErrorCode::SigmaSingular, msg.str());
    }
    const Eigen::VectorXcd coeff = lu.solve(rhs);
    out.coefficients.assign(coeff.data(), coeff.data() + k);
    out.psi = partial;
    for (int nu = 0; nu < n; ++nu) {
        cplx acc{};
        for (int m = 0; m < k; ++m)
            acc += coeff(m) * basis_j(n - k + m, nu);
        out.psi.values[nu] = acc;
        out.psi.filled[nu] = true;
    }
    return out;
}

PsiBoundaryData kirchhoff_complete(const GraphModel& model, int target,
                                   const std::vector<PsiBoundaryData>& full,
                                   const PsiBoundaryData& partial) {
    const int n = model.order();
    const int k = partial.k;
    const auto& fn = model.forms(target);
    std::vector<cplx> u(n);
    for (int nu = 0; nu < k; ++nu)
        u[nu] = eval_Uform(fn, partial.values, nu);
    for (int nu = k; nu < n; ++nu) {
        cplx sum{};
        for (int j = 1; j <= model.edge_count(); ++j) {
            if (j == target)
                continue;
            const auto& d = full.at(j - 1);
            if (!d.complete())
                throw Error(ErrorCode::InvalidArgument,
                            "kirchhoff_complete: edge " + std::to_string(j) + " data incomplete");
            sum += eval_Uform(model.forms(j), d.values, nu);
        }
        u[nu] = -sum;
    }
    PsiBoundaryData out = partial;
    out.values = invert_Uchain(fn, u);
    out.filled.assign(n, true);
    return out;
}

InternalWeylMatrix assemble_mN(const std::vector<PsiBoundaryData>& psi, int j, cplx lambda,
                               double* denominator_condition) {
    const int n = static_cast<int>(psi.size()) + 1;
    InternalWeylMatrix out;
    out.j = j;
    out.lambda = lambda;
    out.m = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k < n; ++k) {
        // Denominator rows are derivative orders 0..k-1, columns psi_{s mu j}, mu = 1..k.
        Eigen::MatrixXcd d(k, k);
        double scale = 1.0;
        for (int mu = 0; mu < k; ++mu) {
            const auto& v = psi[mu].values;
            double norm2 = 0.0;
            for (int nu = 0; nu < n; ++nu)
                norm2 += std::norm(v[nu]);
            scale *= std::sqrt(norm2);
            for (int xi = 0; xi < k; ++xi)
                d(xi, mu) = v[xi];
        }
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d);
        const double rcond = lu.rcond();
        const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
        if (cond > kSigmaConditionLimit || std::abs(lu.determinant()) < kDenominatorFloor * scale) {
            std::ostringstream msg;
            msg << "Cramer denominator of order " << k << " for edge " << j
                << " is negligible at lambda = " << lambda;
            throw Error(ErrorCode::DenominatorSingular, msg.str());
        }
        out.condition = std::max(out.condition, cond);
        // Replacing row k-1 of d by r scales det d by r^T z with d z = e_{k-1}.
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(k);
        e(k - 1) = 1.0;
        const Eigen::VectorXcd z = lu.solve(e);
        for (int nu = k + 1; nu <= n; ++nu) {
            cplx acc{};
            for (int mu = 0; mu < k; ++mu)
                acc += psi[mu].values[nu - 1] * z(mu);
            out.m(k - 1, nu - 1) = acc;
        }
    }
    if (denominator_condition != nullptr)
        *denominator_condition = out.condition;
    return out;
}

int ReconstructionReport::flagged_count() const {
    return static_cast<int>(std::count_if(points.begin(), points.end(),
                                          [](const ReconstructionPoint& p) { return !p.m; }));
}

int ReconstructionReport::valued_count() const {
    return static_cast<int>(points.size()) - flagged_count();
}

std::vector<WeylGrid> weyl_grids(const GraphModel& model, const std::vector<int>& sources,
                                 const std::vector<cplx>& lambdas,
                                 const IntegrationSettings& settings) {
    std::vector<WeylGrid> out(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        out[i].s = sources[i];
        out[i].lambdas = lambdas;
        out[i].matrices.resize(lambdas.size());
        out[i].flagged.assign(lambdas.size(), false);
    }
    // vector<bool> is not safe for concurrent element writes.
    std::vector<std::vector<char>> flags(sources.size(), std::vector<char>(lambdas.size(), 0));
    parallel_for(lambdas.size(), [&](std::size_t p) {
        std::optional<GraphBasis> basis;
        try {
            basis = graph_basis(model, lambdas[p], settings);
        } catch (const Error&) {
            for (auto& f : flags)
                f[p] = 1;
            return;
        }
        for (std::size_t i = 0; i < sources.size(); ++i) {
            try {
                const WeylRecord rec = solve_weyl_record(model, *basis, sources[i]);
                out[i].matrices[p] = rec.matrix();
                flags[i][p] = rec.near_pole() ? 1 : 0;
            } catch (const Error&) {
                flags[i][p] = 1;
            }
        }
    });
    for (std::size_t i = 0; i < sources.size(); ++i)
        for (std::size_t p = 0; p < lambdas.size(); ++p)
            out[i].flagged[p] = flags[i][p] != 0;
    return out;
}

namespace {

std::string flag_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::SigmaSingular: return "sigma_singular";
    case ErrorCode::DenominatorSingular: return "denominator_singular";
    case ErrorCode::WronskianDrift: return "wronskian_drift";
    case ErrorCode::StepLimitExceeded: return "integration_failed";
    default: return "numerical_failure";
    }
}

}  // namespace

ReconstructionReport reconstruct_mN(const GraphModel& model, int target,
                                    const std::vector<WeylGrid>& inputs, int source,
                                    const IntegrationSettings& settings) {
    const int n = model.order();
    const int p = model.edge_count();
    if (target < 1 || target > p || source < 1 || source > p || source == target)
        throw Error(ErrorCode::InvalidArgument, "reconstruct_mN: need 1 <= source != target <= p");
    if (inputs.empty())
        throw Error(ErrorCode::InvalidArgument, "reconstruct_mN: no Weyl data given");

    const WeylGrid* data = nullptr;
    for (const auto& g : inputs) {
        if (g.lambdas != inputs.front().lambdas || g.matrices.size() != g.lambdas.size() ||
            g.flagged.size() != g.lambdas.size())
            throw Error(ErrorCode::GridMismatch, "Weyl data grids differ between source vertices");
        if (g.s == target)
            throw Error(ErrorCode::InvalidArgument, "Weyl data for the target edge must not be used");
        if (g.s == source)
            data = &g;
    }
    if (data == nullptr)
        throw Error(ErrorCode::InvalidArgument,
                    "no Weyl data for source vertex " + std::to_string(source));

    const GraphModel blind = model.without_potential(target);
    ReconstructionReport report;
    report.target = target;
    report.source = source;
    report.points.resize(data->lambdas.size());

    parallel_for(data->lambdas.size(), [&](std::size_t i) {
        ReconstructionPoint& pt = report.points[i];
        pt.lambda = data->lambdas[i];
        if (data->flagged[i] || !data->matrices[i]) {
            pt.flag = "input_flagged";
            return;
        }
        const Eigen::MatrixXcd& weyl = *data->matrices[i];
        try {
            const GraphBasis basis = graph_basis(blind, pt.lambda, settings, target);
            std::vector<PsiBoundaryData> at_target;
            for (int k = 1; k < n; ++k) {
                const PsiBoundaryData at_s = step_edge_s(weyl, basis.at(source), source, k, pt.lambda);
                std::vector<PsiBoundaryData> all = propagate_matching(blind, at_s);
                for (int j = 1; j <= p; ++j) {
                    if (j == source || j == target)
                        continue;
                    SigmaSolution sol = solve_sigma(all[j - 1], basis.at(j));
                    pt.sigma_condition = std::max(pt.sigma_condition, sol.condition);
                    all[j - 1] = std::move(sol.psi);
                }
                at_target.push_back(kirchhoff_complete(blind, target, all, all[target - 1]));
            }
            pt.m = assemble_mN(at_target, target, pt.lambda, &pt.denominator_condition).m;
        } catch (const Error& e) {
            pt.flag = flag_for(e.code());
            pt.m.reset();
        }
    });
    return report;
}

double relative_discrepancy(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    double diff = 0.0, ref = 0.0;
    for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index c = r + 1; c < b.cols(); ++c) {
            diff = std::max(diff, std::abs(a(r, c) - b(r, c)));
            ref = std::max(ref, std::abs(b(r, c)));
        }
    return ref > 0.0 ? diff / ref : diff;
}

CrossValidation cross_validate(const GraphModel& model, int target, const std::vector<int>& sources,
                               const std::vector<cplx>& lambdas, const IntegrationSettings& settings) {
    std::vector<int> measured;
    for (int s = 1; s <= model.edge_count(); ++s)
        if (s != target)
            measured.push_back(s);
    const std::vector<WeylGrid> data = weyl_grids(model, measured, lambdas, settings);

    std::vector<std::optional<Eigen::MatrixXcd>> direct(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        try {
            direct[i] = direct_internal_weyl(model, target, lambdas[i], settings).m;
        } catch (const Error&) {
        }
    });

    CrossValidation out;
    out.total = static_cast<int>(lambdas.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<char> any_flag(lambdas.size(), 0);
    for (int s : sources) {
        ReconstructionReport rep = reconstruct_mN(model, target, data, s, settings);
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            const auto& pt = rep.points[i];
            if (!pt.m || !direct[i]) {
                any_flag[i] = 1;
                out.discrepancies.push_back(nan);
                continue;
            }
            const double d = relative_discrepancy(*pt.m, *direct[i]);
            out.discrepancies.push_back(d);
            out.max_discrepancy = std::max(out.max_discrepancy, d);
            ++out.compared;
        }
        out.reports.push_back(std::move(rep));
    }
    for (std::size_t a = 0; a < out.reports.size(); ++a)
        for (std::size_t b = a + 1; b < out.reports.size(); ++b)
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                const auto& pa = out.reports[a].points[i];
                const auto& pb = out.reports[b].points[i];
                if (pa.m && pb.m)
                    out.source_spread = std::max(out.source_spread, relative_discrepancy(*pa.m, *pb.m));
            }
    out.flagged = static_cast<int>(std::count(any_flag.begin(), any_flag.end(), 1));
    return out;
}

}  // namespace starweyl
