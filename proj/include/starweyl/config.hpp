#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starweyl/stargraph.hpp"

namespace starweyl {

struct GridSpec {
    enum class Kind { List, Linspace, Rect };

    Kind kind = Kind::List;
    std::vector<cplx> points;  // List
    cplx from, to;             // Linspace endpoints
    int count = 0;             // Linspace
    double re_from = 0.0, re_to = 0.0, im_from = 0.0, im_to = 0.0;
    int re_count = 0, im_count = 0;  // Rect, sampled row-major (imaginary part outer)

    std::vector<cplx> lambdas() const;
};

struct RunParams {
    int s = 1;
    int k = 1;
    int N = 0;  // 0: last edge
    int edge = 1;
    std::vector<int> sources;  // empty: every vertex except N
    double tolerance = 1e-6;
    double interval_from = -12.0, interval_to = -0.5;
    int scan_points = 200;
    double refine_tol = 1e-8;
    double arg_rho = 0.3;
    std::vector<double> rho_samples{10.0, 20.0, 40.0};
    double x_probe = 0.0;  // 0: midpoint of edge s
    IntegrationSettings integration;
};

struct RunConfig {
    int order = 2;
    std::vector<EdgeModel> edges;
    std::vector<LinearForms> gamma;
    LeadingConvention convention = LeadingConvention::FirstAbsorbsVandermonde;
    std::optional<GridSpec> grid;
    RunParams params;

    GraphModel model() const;
    int target() const;
    std::vector<int> source_list() const;
};

inline constexpr double kCollarGuard = 4.0;
inline constexpr double kStiffnessGuard = 60.0;

/// Throws Error(SchemaError) for malformed documents, AdmissibilityError for
/// inadmissible edges and Error(GuardViolation) when the grid leaves the
/// supported |lambda| range.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

/// Throws Error(GuardViolation) if some lambda breaks |lambda|^{1/n} x0 <= 4
/// or |lambda|^{1/n} (l - x0) <= 60 on some edge.
void check_guards(const RunConfig& config, const std::vector<cplx>& lambdas);

}  // namespace starweyl
