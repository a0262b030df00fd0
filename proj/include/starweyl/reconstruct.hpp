#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starweyl/stargraph.hpp"

namespace starweyl {

/// psi_{skj}^{(nu)}(l_j) for nu = 0..n-1 with a mask of what is known so far.
struct PsiBoundaryData {
    int s = 0;
    int k = 0;
    int j = 0;
    cplx lambda;
    std::vector<cplx> values;
    std::vector<bool> filled;

    bool complete() const;
};

/// Weyl-type matrices M_s sampled on a lambda grid; a missing matrix or a set
/// flag marks a point the producer could not value.
struct WeylGrid {
    int s = 0;
    std::vector<cplx> lambdas;
    std::vector<std::optional<Eigen::MatrixXcd>> matrices;
    std::vector<bool> flagged;
};

inline constexpr double kSigmaConditionLimit = 1e10;
inline constexpr double kDenominatorFloor = 1e-12;

PsiBoundaryData step_edge_s(const Eigen::MatrixXcd& weyl, const Eigen::MatrixXcd& basis_s, int s, int k,
                            cplx lambda);

/// Continuity data psi_{skj}^{(nu)}(l_j), nu < k, for every j != s (index j-1;
/// entry s holds the input unchanged).
std::vector<PsiBoundaryData> propagate_matching(const GraphModel& model, const PsiBoundaryData& at_s);

struct SigmaSolution {
    PsiBoundaryData psi;
    std::vector<cplx> coefficients;  // M_{skj,mu}, mu = n-k+1..n
    double condition = 0.0;
};

/// Throws Error(SigmaSingular) when the k x k system is numerically singular.
SigmaSolution solve_sigma(const PsiBoundaryData& partial, const Eigen::MatrixXcd& basis_j);

/// Fills psi_{skN}^{(nu)}(l_N), nu = k..n-1, from the Kirchhoff sums.
/// `full` is indexed by j-1 and must be complete for every j != N.
PsiBoundaryData kirchhoff_complete(const GraphModel& model, int target,
                                   const std::vector<PsiBoundaryData>& full,
                                   const PsiBoundaryData& partial_target);

/// Internal Weyl matrix of edge j from psi_{skj} boundary data, k = 1..n-1.
/// Throws Error(DenominatorSingular) when a Cramer denominator is negligible.
InternalWeylMatrix assemble_mN(const std::vector<PsiBoundaryData>& psi, int j, cplx lambda,
                               double* denominator_condition = nullptr);

struct ReconstructionPoint {
    cplx lambda;
    std::optional<Eigen::MatrixXcd> m;
    std::string flag = "ok";
    double sigma_condition = 0.0;
    double denominator_condition = 0.0;
};

struct ReconstructionReport {
    int target = 0;
    int source = 0;
    std::vector<ReconstructionPoint> points;

    int flagged_count() const;
    int valued_count() const;
};

/// Forward data: M_s(lambda) for each requested s on a grid.
std::vector<WeylGrid> weyl_grids(const GraphModel& model, const std::vector<int>& sources,
                                 const std::vector<cplx>& lambdas,
                                 const IntegrationSettings& settings = {});

/// Recovers m_N on the grid of `inputs` using the Weyl matrix of `source`
/// and the potentials of every edge except N. The potential of edge N in
/// `model` is never read.
ReconstructionReport reconstruct_mN(const GraphModel& model, int target,
                                    const std::vector<WeylGrid>& inputs, int source,
                                    const IntegrationSettings& settings = {});

struct CrossValidation {
    double max_discrepancy = 0.0;
    double source_spread = 0.0;
    int compared = 0;
    int flagged = 0;
    int total = 0;
    std::vector<double> discrepancies;  // per point and source; NaN when flagged
    std::vector<ReconstructionReport> reports;
};

/// Strict-upper-part relative difference max|a - b| / max|b|.
double relative_discrepancy(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

CrossValidation cross_validate(const GraphModel& model, int target, const std::vector<int>& sources,
                               const std::vector<cplx>& lambdas,
                               const IntegrationSettings& settings = {});

}  // namespace starweyl
