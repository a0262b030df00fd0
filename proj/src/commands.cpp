#include "starweyl/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "starweyl/gridio.hpp"
#include "starweyl/parallel.hpp"
#include "starweyl/reconstruct.hpp"
#include "starweyl/sectors.hpp"

namespace starweyl {

using nlohmann::json;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<cplx> require_grid(const RunConfig& c, const std::string& command) {
    if (!c.grid)
        throw Error(ErrorCode::SchemaError, "command '" + command + "' needs a grid");
    return c.grid->lambdas();
}

std::string manifest(const std::string& command, const RunConfig& c, const std::string& extra) {
    std::ostringstream m;
    m << "starweyl " << command << " n=" << c.order << " p=" << c.edges.size();
    if (!extra.empty())
        m << ' ' << extra;
    return m.str();
}

void emit(const CsvTable& table, const CommandOptions& options, std::ostream& out) {
    if (options.out_path.empty()) {
        write_csv(out, table);
        return;
    }
    std::ofstream f(options.out_path);
    if (!f)
        throw Error(ErrorCode::IoError, "cannot write " + options.out_path);
    write_csv(f, table);
    if (!f)
        throw Error(ErrorCode::IoError, "write failed for " + options.out_path);
}

std::vector<std::string> lambda_header() {
    return {"lambda_re", "lambda_im"};
}

void add_pairs(std::vector<std::string>& header, const std::vector<std::string>& stems) {
    for (const auto& s : stems) {
        header.push_back(s + "_re");
        header.push_back(s + "_im");
    }
}

std::string flag_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::SingularSystem: return "singular";
    case ErrorCode::WronskianDrift: return "wronskian_drift";
    case ErrorCode::StepLimitExceeded: return "integration_failed";
    default: return "failed";
    }
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    const GraphModel model = c.model();
    json doc;
    doc["status"] = "ok";
    doc["order"] = c.order;
    json edges = json::array();
    for (int j = 1; j <= model.edge_count(); ++j) {
        const auto& ex = model.edge(j).exponents;
        json roots = json::array();
        for (cplx z : ex.roots)
            roots.push_back({z.real(), z.imag()});
        edges.push_back({{"index", j}, {"exponents", roots}, {"theta", ex.theta}});
    }
    doc["edges"] = edges;
    doc["grid_points"] = c.grid ? c.grid->lambdas().size() : 0;
    out << doc.dump() << '\n';
    return kExitOk;
}

int cmd_basis(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const auto lambdas = require_grid(c, "basis");
    const GraphModel model = c.model();
    const int n = c.order;
    const int j = c.params.edge;
    CsvTable t;
    t.manifest = manifest("basis", c, "edge=" + std::to_string(j));
    t.header = lambda_header();
    std::vector<std::string> stems;
    for (int k = 1; k <= n; ++k)
        for (int nu = 0; nu < n; ++nu)
            stems.push_back("S_j" + std::to_string(j) + "_k" + std::to_string(k) + "_nu" + std::to_string(nu));
    add_pairs(t.header, stems);
    t.header.insert(t.header.end(), {"flag", "condition"});
    t.rows.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        auto& row = t.rows[i];
        append_complex(row, lambdas[i]);
        try {
            const BasisValues b = integrate_basis(model.edge(j), lambdas[i], c.params.integration);
            for (int k = 0; k < n; ++k)
                for (int nu = 0; nu < n; ++nu)
                    append_complex(row, b.values(k, nu));
            row.push_back("ok");
            row.push_back(format_double(b.wronskian_drift));
        } catch (const Error& e) {
            row.resize(2);
            for (int m = 0; m < 2 * n * n; ++m)
                row.emplace_back("nan");
            row.push_back(flag_name(e.code()));
            row.push_back("nan");
        }
    });
    emit(t, o, out);
    return kExitOk;
}

int cmd_weyl(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const auto lambdas = require_grid(c, "weyl");
    const GraphModel model = c.model();
    const int n = c.order;
    const int s = c.params.s;
    const std::string prefix = "M_s" + std::to_string(s);
    CsvTable t;
    t.manifest = manifest("weyl", c, "s=" + std::to_string(s));
    t.header = lambda_header();
    add_pairs(t.header, upper_entry_names(prefix, n, "mu"));
    std::vector<std::string> deltas;
    for (int k = 1; k < n; ++k)
        deltas.push_back("Delta_s" + std::to_string(s) + "_k" + std::to_string(k));
    add_pairs(t.header, deltas);
    t.header.insert(t.header.end(), {"flag", "condition"});
    t.rows.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        auto& row = t.rows[i];
        append_complex(row, lambdas[i]);
        std::optional<GraphBasis> basis;
        try {
            basis = graph_basis(model, lambdas[i], c.params.integration);
        } catch (const Error& e) {
            append_nan_upper(row, n);
            for (int k = 1; k < n; ++k)
                append_complex(row, cplx(kNaN, kNaN));
            row.push_back(flag_name(e.code()));
            row.push_back("nan");
            return;
        }
        try {
            const WeylRecord rec = solve_weyl_record(model, *basis, s);
            append_upper(row, rec.matrix());
            double cond = 0.0;
            for (const auto& r : rec.rows) {
                append_complex(row, r.delta);
                cond = std::max(cond, r.condition);
            }
            row.push_back(rec.near_pole() ? "near_pole" : "ok");
            row.push_back(format_double(cond));
        } catch (const Error& e) {
            append_nan_upper(row, n);
            for (int k = 1; k < n; ++k)
                append_complex(row, char_function(model, *basis, s, k));
            row.push_back(flag_name(e.code()));
            row.push_back("inf");
        }
    });
    emit(t, o, out);
    return kExitOk;
}

int cmd_internal(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const auto lambdas = require_grid(c, "internal");
    const GraphModel model = c.model();
    const int n = c.order;
    const int j = c.params.edge;
    CsvTable t;
    t.manifest = manifest("internal", c, "edge=" + std::to_string(j));
    t.header = lambda_header();
    add_pairs(t.header, upper_entry_names("m_j" + std::to_string(j), n, "nu"));
    t.header.insert(t.header.end(), {"flag", "condition"});
    t.rows.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        auto& row = t.rows[i];
        append_complex(row, lambdas[i]);
        try {
            const InternalWeylMatrix m = direct_internal_weyl(model, j, lambdas[i], c.params.integration);
            append_upper(row, m.m);
            row.push_back("ok");
            row.push_back(format_double(m.condition));
        } catch (const Error& e) {
            append_nan_upper(row, n);
            row.push_back(flag_name(e.code()));
            row.push_back("inf");
        }
    });
    emit(t, o, out);
    return kExitOk;
}

int cmd_eigs(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const RunParams& p = c.params;
    EigenScanOptions opts;
    opts.grid_points = p.scan_points;
    opts.tolerance = p.refine_tol;
    const EigenScanResult r =
        eigen_scan(c.model(), p.s, p.k, p.interval_from, p.interval_to, opts, p.integration);
    CsvTable t;
    t.manifest = manifest("eigs", c,
                          "s=" + std::to_string(p.s) + " k=" + std::to_string(p.k) + " interval=[" +
                              format_double(p.interval_from) + "," + format_double(p.interval_to) + "]");
    t.header = {"lambda_re", "lambda_im", "residual", "iterations", "status"};
    const auto add = [&t](const EigenCandidate& e, const char* status) {
        std::vector<std::string> row;
        append_complex(row, e.lambda);
        row.push_back(format_double(e.residual));
        row.push_back(std::to_string(e.iterations));
        row.push_back(status);
        t.rows.push_back(std::move(row));
    };
    for (const auto& e : r.eigenvalues)
        add(e, "accepted");
    for (const auto& e : r.rejected)
        add(e, "rejected");
    emit(t, o, out);
    return kExitOk;
}

int cmd_asym(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const RunParams& p = c.params;
    const GraphModel model = c.model();
    const double x = p.x_probe > 0.0 ? p.x_probe : 0.5 * model.edge(p.s).edge.length;
    const auto devs = asymptotic_check(model, p.s, p.k, p.arg_rho, p.rho_samples, x, p.integration);
    CsvTable t;
    t.manifest = manifest("asym", c,
                          "s=" + std::to_string(p.s) + " k=" + std::to_string(p.k) +
                              " arg_rho=" + format_double(p.arg_rho) + " x=" + format_double(x));
    t.header = {"rho_abs", "deviation", "ratio"};
    for (std::size_t i = 0; i < devs.size(); ++i)
        t.rows.push_back({format_double(p.rho_samples[i]), format_double(devs[i]),
                          i == 0 ? "nan" : format_double(devs[i] / devs[i - 1])});
    emit(t, o, out);
    return kExitOk;
}

int cmd_reconstruct(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const GraphModel model = c.model();
    const int n = c.order;
    const int target = c.target();
    std::vector<WeylGrid> inputs;
    if (o.weyl_csv.empty()) {
        inputs = weyl_grids(model, c.source_list(), require_grid(c, "reconstruct"), c.params.integration);
    } else {
        for (const auto& path : o.weyl_csv)
            inputs.push_back(read_weyl_csv(path, n));
        check_guards(c, inputs.front().lambdas);
    }
    int source = c.params.s;
    if (source == target ||
        std::none_of(inputs.begin(), inputs.end(), [source](const WeylGrid& g) { return g.s == source; }))
        source = inputs.front().s;
    const ReconstructionReport rep = reconstruct_mN(model, target, inputs, source, c.params.integration);

    CsvTable t;
    t.manifest = manifest("reconstruct", c,
                          "N=" + std::to_string(target) + " source=" + std::to_string(source));
    t.header = lambda_header();
    add_pairs(t.header, upper_entry_names("m_j" + std::to_string(target), n, "nu"));
    t.header.insert(t.header.end(), {"flag", "condition"});
    for (const auto& pt : rep.points) {
        std::vector<std::string> row;
        append_complex(row, pt.lambda);
        if (pt.m)
            append_upper(row, *pt.m);
        else
            append_nan_upper(row, n);
        row.push_back(pt.flag);
        row.push_back(pt.m ? format_double(std::max(pt.sigma_condition, pt.denominator_condition)) : "inf");
        t.rows.push_back(std::move(row));
    }
    emit(t, o, out);
    return kExitOk;
}

int cmd_roundtrip(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
    const auto lambdas = require_grid(c, "roundtrip");
    const auto sources = c.source_list();
    const int target = c.target();
    const CrossValidation cv = cross_validate(c.model(), target, sources, lambdas, c.params.integration);
    const bool pass = cv.compared > 0 && cv.max_discrepancy <= c.params.tolerance;

    if (!o.out_path.empty()) {
        CsvTable t;
        t.manifest = manifest("roundtrip", c, "N=" + std::to_string(target));
        t.header = lambda_header();
        for (int s : sources)
            t.header.push_back("discrepancy_s" + std::to_string(s));
        t.header.push_back("flag");
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            std::vector<std::string> row;
            append_complex(row, lambdas[i]);
            std::string flag = "ok";
            for (std::size_t a = 0; a < sources.size(); ++a) {
                row.push_back(format_double(cv.discrepancies[a * lambdas.size() + i]));
                const auto& f = cv.reports[a].points[i].flag;
                if (f != "ok" && flag == "ok")
                    flag = f;
            }
            row.push_back(flag);
            t.rows.push_back(std::move(row));
        }
        emit(t, o, out);
    }
    json doc;
    doc["command"] = "roundtrip";
    doc["target"] = target;
    doc["sources"] = sources;
    doc["max_discrepancy"] = cv.max_discrepancy;
    doc["source_spread"] = cv.source_spread;
    doc["compared"] = cv.compared;
    doc["flagged"] = cv.flagged;
    doc["total"] = cv.total;
    doc["tolerance"] = c.params.tolerance;
    doc["pass"] = pass;
    out << doc.dump() << '\n';
    return pass ? kExitOk : kExitNumerical;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"validate", "basis", "weyl", "internal",
                                                "eigs", "asym", "reconstruct", "roundtrip"};
    return names;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::SchemaError:
    case ErrorCode::AdmissibilityViolation:
    case ErrorCode::GuardViolation:
    case ErrorCode::InvalidArgument:
    case ErrorCode::GridMismatch:
    case ErrorCode::BoundaryArgument:
        return kExitValidation;
    case ErrorCode::IoError:
        return kExitIo;
    default:
        return kExitNumerical;
    }
}

void write_error(std::ostream& err, const std::string& code, const std::string& message) {
    err << json{{"error", code}, {"message", message}}.dump() << '\n';
}

int run_command(const RunConfig& config, const std::string& command, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
    try {
        if (command == "validate") return cmd_validate(config, out);
        if (command == "basis") return cmd_basis(config, options, out);
        if (command == "weyl") return cmd_weyl(config, options, out);
        if (command == "internal") return cmd_internal(config, options, out);
        if (command == "eigs") return cmd_eigs(config, options, out);
        if (command == "asym") return cmd_asym(config, options, out);
        if (command == "reconstruct") return cmd_reconstruct(config, options, out);
        if (command == "roundtrip") return cmd_roundtrip(config, options, out);
        write_error(err, "SchemaError", "unknown command '" + command + "'");
        return kExitValidation;
    } catch (const Error& e) {
        write_error(err, error_name(e.code()), e.what());
        return exit_code_for(e.code());
    }
}

int run_cli(const std::string& config_path, const std::string& command, const CommandOptions& options,
            std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const AdmissibilityError& e) {
        err << json{{"error", "AdmissibilityViolation"}, {"reason", reason_name(e.reason())},
                    {"message", e.what()}}
                   .dump()
            << '\n';
        return kExitValidation;
    } catch (const Error& e) {
        write_error(err, error_name(e.code()), e.what());
        return exit_code_for(e.code());
    }
    return run_command(config, command, options, out, err);
}

}  // namespace starweyl
