#pragma once

#include <optional>
#include <span>
#include <vector>

#include "starweyl/basis.hpp"
#include "starweyl/exponents.hpp"
#include "starweyl/propagate.hpp"

namespace starweyl {

/// Triangular coefficients gamma_{nu,mu} (mu <= nu) of the forms
/// U_nu(y) = sum_mu gamma_{nu,mu} y^{(mu)}(l) for one edge.
struct LinearForms {
    std::vector<std::vector<cplx>> rows;  // rows[nu] has nu+1 entries

    static LinearForms identity(int order);
    int order() const { return static_cast<int>(rows.size()); }
    cplx at(int nu, int mu) const { return rows[nu][mu]; }
};

cplx eval_Uform(const LinearForms& forms, std::span<const cplx> values, int nu);

/// Back-substitution y^{(nu)} = (U_nu - sum_{mu<nu} gamma_{nu,mu} y^{(mu)}) / gamma_{nu,nu}
/// for nu = 0..u_values.size()-1.
std::vector<cplx> invert_Uchain(const LinearForms& forms, std::span<const cplx> u_values);

class GraphModel {
public:
    GraphModel(int order, std::vector<EdgeModel> edges, std::vector<LinearForms> forms,
               LeadingConvention convention = LeadingConvention::FirstAbsorbsVandermonde);

    int order() const { return order_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    LeadingConvention convention() const { return convention_; }

    // 1-based edge index.
    const PreparedEdge& edge(int j) const { return edges_.at(j - 1); }
    const LinearForms& forms(int j) const { return forms_.at(j - 1); }

    /// Same graph with the potential on edge j replaced by zero.
    GraphModel without_potential(int j) const;

private:
    int order_;
    LeadingConvention convention_;
    std::vector<PreparedEdge> edges_;
    std::vector<LinearForms> forms_;
};

/// S-basis values at the internal vertex for every edge at one lambda.
struct GraphBasis {
    cplx lambda;
    std::vector<std::optional<BasisValues>> edges;  // index j-1

    const Eigen::MatrixXcd& at(int j) const;
    bool has(int j) const { return edges.at(j - 1).has_value(); }
};

/// Integrates every edge except `skip_edge` (0 skips none).
GraphBasis graph_basis(const GraphModel& model, cplx lambda, const IntegrationSettings& settings = {},
                       int skip_edge = 0);

/// Coefficients of the Weyl-type solution of order k for source vertex s.
struct WeylRow {
    int k = 0;
    std::vector<cplx> own;                  // M_{sk,mu}, mu = k+1..n
    std::vector<std::vector<cplx>> other;   // [j-1]: M_{skj,mu}, mu = n-k+1..n; empty for j = s
    cplx delta;                             // characteristic function Delta_{sk}
    double condition = 0.0;
    double residual = 0.0;
    bool near_pole = false;
};

struct WeylRecord {
    int s = 0;
    cplx lambda;
    std::vector<WeylRow> rows;  // k = 1..n-1

    bool near_pole() const;
    /// Unit upper-triangular n x n Weyl-type matrix M_s(lambda).
    Eigen::MatrixXcd matrix() const;
};

struct MatchingSystem {
    Eigen::MatrixXcd matrix;
    Eigen::VectorXcd rhs;
};

inline constexpr double kNearPoleCondition = 1e10;
inline constexpr double kNearPoleHadamard = 1e-10;

/// Substitutes the S-basis expansions into the continuity and Kirchhoff
/// conditions. Unknowns: [M_{sk,k+1..n}, then per edge j != s ascending
/// M_{skj,n-k+1..n}]; equations: continuity against edge 1 for j = 2..p,
/// nu < k, then Kirchhoff sums for nu = k..n-1.
MatchingSystem assemble_matching(const GraphModel& model, const GraphBasis& basis, int s, int k);

/// Throws Error(SingularSystem) when lambda is an eigenvalue of the problem.
WeylRow solve_weyl(const GraphModel& model, const GraphBasis& basis, int s, int k);
WeylRecord solve_weyl_record(const GraphModel& model, const GraphBasis& basis, int s);

Eigen::MatrixXcd weyl_matrix(const GraphModel& model, int s, cplx lambda,
                             const IntegrationSettings& settings = {});

cplx char_function(const GraphModel& model, const GraphBasis& basis, int s, int k);
cplx char_function(const GraphModel& model, int s, int k, cplx lambda,
                   const IntegrationSettings& settings = {});

/// psi_{skj}^{(nu)}(l_j), nu = 0..n-1, from a solved row.
std::vector<cplx> forward_psi(const GraphModel& model, const GraphBasis& basis, const WeylRow& row,
                              int s, int j);

struct InternalWeylMatrix {
    int j = 0;
    cplx lambda;
    Eigen::MatrixXcd m;  // unit upper triangular
    double condition = 0.0;
};

InternalWeylMatrix direct_internal_weyl(const BasisValues& at_vertex, int j);
InternalWeylMatrix direct_internal_weyl(const GraphModel& model, int j, cplx lambda,
                                        const IntegrationSettings& settings = {});

struct EigenCandidate {
    cplx lambda;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct EigenScanResult {
    std::vector<EigenCandidate> eigenvalues;
    std::vector<EigenCandidate> rejected;
};

struct EigenScanOptions {
    int grid_points = 200;
    double tolerance = 1e-8;
    int max_iterations = 100;
};

EigenScanResult eigen_scan(const GraphModel& model, int s, int k, double lambda_from,
                           double lambda_to, const EigenScanOptions& options = {},
                           const IntegrationSettings& settings = {});

/// |psi_{sks}(x, rho^n) rho^{xi_k} exp(-rho R_k x) / omega_k - 1| for each |rho|.
std::vector<double> asymptotic_check(const GraphModel& model, int s, int k, double arg_rho,
                                     std::span<const double> rho_abs, double x_probe,
                                     const IntegrationSettings& settings = {});

}  // namespace starweyl
