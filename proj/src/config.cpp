#include "starweyl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "starweyl/errors.hpp"

namespace starweyl {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) {
    throw Error(ErrorCode::SchemaError, what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        schema(where + ": missing field '" + key + "'");
    return obj.at(key);
}

double real_of(const json& v, const std::string& where) {
    if (!v.is_number())
        schema(where + ": expected a number");
    return v.get<double>();
}

int int_of(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        schema(where + ": expected an integer");
    return v.get<int>();
}

// A complex number is either a plain number or a pair [re, im].
cplx complex_of(const json& v, const std::string& where) {
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    schema(where + ": expected a number or [re, im]");
}

json complex_json(cplx z) {
    if (z.imag() == 0.0)
        return z.real();
    return json::array({z.real(), z.imag()});
}

std::vector<cplx> complex_list(const json& v, const std::string& where) {
    if (!v.is_array())
        schema(where + ": expected a list");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(complex_of(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

EdgeModel parse_edge(const json& e, int order, int index) {
    const std::string where = "edges[" + std::to_string(index - 1) + "]";
    EdgeModel edge;
    edge.index = index;
    edge.order = order;
    edge.length = real_of(field(e, "length", where), where + ".length");
    edge.collar = real_of(field(e, "collar", where), where + ".collar");
    const json& nu = field(e, "nu", where);
    // A bare number is accepted as the single coefficient of a second-order edge.
    if (nu.is_number())
        edge.nu = {complex_of(nu, where + ".nu")};
    else
        edge.nu = complex_list(nu, where + ".nu");
    if (static_cast<int>(edge.nu.size()) != order - 1)
        schema(where + ".nu: expected " + std::to_string(order - 1) + " coefficients");

    edge.potentials.assign(order - 1, CollaredPolynomial());
    if (e.contains("potentials")) {
        const json& pots = e.at("potentials");
        if (!pots.is_array() || static_cast<int>(pots.size()) > order - 1)
            schema(where + ".potentials: expected at most " + std::to_string(order - 1) + " entries");
        for (std::size_t mu = 0; mu < pots.size(); ++mu) {
            const std::string pw = where + ".potentials[" + std::to_string(mu) + "]";
            const json& q = pots[mu];
            if (q.is_null() || (q.is_object() && q.empty()))
                continue;
            const double end = real_of(field(q, "collar_end", pw), pw + ".collar_end");
            edge.potentials[mu] = CollaredPolynomial(end, complex_list(field(q, "coeffs", pw), pw + ".coeffs"));
        }
    }
    try {
        edge.validate();
    } catch (const Error& err) {
        if (err.code() == ErrorCode::InvalidArgument)
            schema(where + ": " + err.what());
        throw;
    }
    return edge;
}

LinearForms parse_forms(const json& g, int order, int index) {
    const std::string where = "gamma[" + std::to_string(index - 1) + "]";
    if (!g.is_array() || static_cast<int>(g.size()) != order)
        schema(where + ": expected " + std::to_string(order) + " rows");
    LinearForms forms;
    for (int nu = 0; nu < order; ++nu) {
        auto row = complex_list(g[nu], where + "[" + std::to_string(nu) + "]");
        if (static_cast<int>(row.size()) != nu + 1)
            schema(where + "[" + std::to_string(nu) + "]: expected " + std::to_string(nu + 1) + " entries");
        if (row[nu] == cplx{})
            schema("gamma diagonal vanishes on edge " + std::to_string(index) + " at nu = " +
                   std::to_string(nu));
        forms.rows.push_back(std::move(row));
    }
    return forms;
}

GridSpec parse_grid(const json& g) {
    GridSpec spec;
    const std::string type = field(g, "type", "grid").is_string() ? g.at("type").get<std::string>() : "";
    if (type == "list") {
        spec.kind = GridSpec::Kind::List;
        spec.points = complex_list(field(g, "points", "grid"), "grid.points");
    } else if (type == "linspace") {
        spec.kind = GridSpec::Kind::Linspace;
        spec.from = complex_of(field(g, "from", "grid"), "grid.from");
        spec.to = complex_of(field(g, "to", "grid"), "grid.to");
        spec.count = int_of(field(g, "count", "grid"), "grid.count");
        if (spec.count < 1)
            schema("grid.count must be positive");
    } else if (type == "rect") {
        spec.kind = GridSpec::Kind::Rect;
        const json& re = field(g, "re", "grid");
        const json& im = field(g, "im", "grid");
        if (!re.is_array() || re.size() != 2 || !im.is_array() || im.size() != 2)
            schema("grid.re and grid.im must be [from, to]");
        spec.re_from = real_of(re[0], "grid.re[0]");
        spec.re_to = real_of(re[1], "grid.re[1]");
        spec.im_from = real_of(im[0], "grid.im[0]");
        spec.im_to = real_of(im[1], "grid.im[1]");
        spec.re_count = int_of(field(g, "re_count", "grid"), "grid.re_count");
        spec.im_count = int_of(field(g, "im_count", "grid"), "grid.im_count");
        if (spec.re_count < 1 || spec.im_count < 1)
            schema("grid counts must be positive");
    } else {
        schema("grid.type must be one of list, linspace, rect");
    }
    return spec;
}

json grid_json(const GridSpec& g) {
    json out;
    switch (g.kind) {
    case GridSpec::Kind::List: {
        out["type"] = "list";
        json pts = json::array();
        for (cplx z : g.points)
            pts.push_back(complex_json(z));
        out["points"] = pts;
        break;
    }
    case GridSpec::Kind::Linspace:
        out["type"] = "linspace";
        out["from"] = complex_json(g.from);
        out["to"] = complex_json(g.to);
        out["count"] = g.count;
        break;
    case GridSpec::Kind::Rect:
        out["type"] = "rect";
        out["re"] = {g.re_from, g.re_to};
        out["im"] = {g.im_from, g.im_to};
        out["re_count"] = g.re_count;
        out["im_count"] = g.im_count;
        break;
    }
    return out;
}

std::vector<int> int_list(const json& v, const std::string& where) {
    if (!v.is_array())
        schema(where + ": expected a list");
    std::vector<int> out;
    for (const auto& x : v)
        out.push_back(int_of(x, where));
    return out;
}

void parse_params(const json& p, RunParams& out) {
    if (!p.is_object())
        schema("params: expected an object");
    static const char* known[] = {"s", "k", "N", "edge", "sources", "tolerance", "interval", "scan_points",
                                  "refine_tol", "arg_rho", "rho_samples", "x_probe", "rtol", "atol",
                                  "max_steps"};
    for (auto it = p.begin(); it != p.end(); ++it) {
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
            schema("params: unknown field '" + it.key() + "'");
    }
    if (p.contains("s")) out.s = int_of(p["s"], "params.s");
    if (p.contains("k")) out.k = int_of(p["k"], "params.k");
    if (p.contains("N")) out.N = int_of(p["N"], "params.N");
    if (p.contains("edge")) out.edge = int_of(p["edge"], "params.edge");
    if (p.contains("sources")) out.sources = int_list(p["sources"], "params.sources");
    if (p.contains("tolerance")) out.tolerance = real_of(p["tolerance"], "params.tolerance");
    if (p.contains("interval")) {
        const json& iv = p["interval"];
        if (!iv.is_array() || iv.size() != 2)
            schema("params.interval must be [from, to]");
        out.interval_from = real_of(iv[0], "params.interval[0]");
        out.interval_to = real_of(iv[1], "params.interval[1]");
    }
    if (p.contains("scan_points")) out.scan_points = int_of(p["scan_points"], "params.scan_points");
    if (p.contains("refine_tol")) out.refine_tol = real_of(p["refine_tol"], "params.refine_tol");
    if (p.contains("arg_rho")) out.arg_rho = real_of(p["arg_rho"], "params.arg_rho");
    if (p.contains("rho_samples")) {
        out.rho_samples.clear();
        const json& r = p["rho_samples"];
        if (!r.is_array())
            schema("params.rho_samples: expected a list");
        for (const auto& x : r)
            out.rho_samples.push_back(real_of(x, "params.rho_samples"));
    }
    if (p.contains("x_probe")) out.x_probe = real_of(p["x_probe"], "params.x_probe");
    if (p.contains("rtol")) out.integration.rtol = real_of(p["rtol"], "params.rtol");
    if (p.contains("atol")) out.integration.atol = real_of(p["atol"], "params.atol");
    if (p.contains("max_steps")) {
        if (!p["max_steps"].is_number_integer())
            schema("params.max_steps: expected an integer");
        out.integration.max_steps = p["max_steps"].get<long>();
    }
}

void check_params(const RunConfig& c) {
    const int p = static_cast<int>(c.edges.size());
    const auto in_range = [p](int v) { return v >= 1 && v <= p; };
    const RunParams& r = c.params;
    if (!in_range(r.s)) schema("params.s out of range");
    if (!in_range(r.edge)) schema("params.edge out of range");
    if (r.N != 0 && !in_range(r.N)) schema("params.N out of range");
    if (r.k < 1 || r.k > c.order) schema("params.k out of range");
    for (int s : r.sources)
        if (!in_range(s) || s == c.target())
            schema("params.sources must name vertices other than N");
    if (!(r.tolerance > 0.0)) schema("params.tolerance must be positive");
    if (!(r.refine_tol > 0.0)) schema("params.refine_tol must be positive");
    if (r.scan_points < 3) schema("params.scan_points must be at least 3");
    if (!(r.interval_from < r.interval_to)) schema("params.interval must be increasing");
    for (double rho : r.rho_samples)
        if (!(rho > 0.0)) schema("params.rho_samples must be positive");
    try {
        r.integration.validate();
    } catch (const Error& e) {
        schema(std::string("params: ") + e.what());
    }
}

}  // namespace

std::vector<cplx> GridSpec::lambdas() const {
    std::vector<cplx> out;
    switch (kind) {
    case Kind::List:
        out = points;
        break;
    case Kind::Linspace:
        for (int i = 0; i < count; ++i)
            out.push_back(count == 1 ? from : from + (to - from) * (static_cast<double>(i) / (count - 1)));
        break;
    case Kind::Rect:
        for (int b = 0; b < im_count; ++b) {
            const double im = im_count == 1 ? im_from : im_from + (im_to - im_from) * b / (im_count - 1);
            for (int a = 0; a < re_count; ++a) {
                const double re = re_count == 1 ? re_from : re_from + (re_to - re_from) * a / (re_count - 1);
                out.emplace_back(re, im);
            }
        }
        break;
    }
    return out;
}

GraphModel RunConfig::model() const {
    return GraphModel(order, edges, gamma, convention);
}

int RunConfig::target() const {
    return params.N == 0 ? static_cast<int>(edges.size()) : params.N;
}

std::vector<int> RunConfig::source_list() const {
    if (!params.sources.empty())
        return params.sources;
    std::vector<int> out;
    for (int s = 1; s <= static_cast<int>(edges.size()); ++s)
        if (s != target())
            out.push_back(s);
    return out;
}

void check_guards(const RunConfig& config, const std::vector<cplx>& lambdas) {
    for (cplx lambda : lambdas) {
        const double rho = std::pow(std::abs(lambda), 1.0 / config.order);
        for (const auto& e : config.edges) {
            std::ostringstream msg;
            if (rho * e.collar > kCollarGuard)
                msg << "|lambda|^(1/n) x0 = " << rho * e.collar << " exceeds " << kCollarGuard;
            else if (rho * (e.length - e.collar) > kStiffnessGuard)
                msg << "|lambda|^(1/n) (l - x0) = " << rho * (e.length - e.collar) << " exceeds "
                    << kStiffnessGuard;
            else
                continue;
            msg << " on edge " << e.index << " at lambda = " << lambda;
            throw Error(ErrorCode::GuardViolation, msg.str());
        }
    }
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        schema(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object())
        schema("top level must be an object");

    RunConfig c;
    c.order = int_of(field(doc, "order", "config"), "order");
    if (c.order < 2)
        schema("order must be at least 2");
    const json& edges = field(doc, "edges", "config");
    if (!edges.is_array() || edges.size() < 2)
        schema("edges: need at least two edges");
    for (std::size_t i = 0; i < edges.size(); ++i)
        c.edges.push_back(parse_edge(edges[i], c.order, static_cast<int>(i) + 1));

    if (doc.contains("gamma")) {
        const json& g = doc["gamma"];
        if (!g.is_array() || g.size() != edges.size())
            schema("gamma: expected one block per edge");
        for (std::size_t i = 0; i < g.size(); ++i)
            c.gamma.push_back(parse_forms(g[i], c.order, static_cast<int>(i) + 1));
    } else {
        c.gamma.assign(edges.size(), LinearForms::identity(c.order));
    }

    if (doc.contains("convention")) {
        const json& v = doc["convention"];
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "first")
            c.convention = LeadingConvention::FirstAbsorbsVandermonde;
        else if (name == "last")
            c.convention = LeadingConvention::LastAbsorbsVandermonde;
        else
            schema("convention must be 'first' or 'last'");
    }
    if (doc.contains("grid"))
        c.grid = parse_grid(doc["grid"]);
    if (doc.contains("params"))
        parse_params(doc["params"], c.params);
    check_params(c);

    // Admissibility and gamma checks run through the model constructor.
    try {
        (void)c.model();
    } catch (const AdmissibilityError&) {
        throw;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument)
            schema(e.what());
        throw;
    }

    if (c.grid)
        check_guards(c, c.grid->lambdas());
    std::vector<cplx> extra{cplx(c.params.interval_from), cplx(c.params.interval_to)};
    for (double rho : c.params.rho_samples)
        extra.emplace_back(std::pow(rho, c.order));
    check_guards(c, extra);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    json doc;
    doc["order"] = c.order;
    json edges = json::array();
    for (const auto& e : c.edges) {
        json je;
        je["length"] = e.length;
        je["collar"] = e.collar;
        json nu = json::array();
        for (cplx z : e.nu)
            nu.push_back(complex_json(z));
        je["nu"] = nu;
        json pots = json::array();
        for (const auto& q : e.potentials) {
            if (q.is_zero()) {
                pots.push_back(nullptr);
                continue;
            }
            json coeffs = json::array();
            for (cplx a : q.coeffs())
                coeffs.push_back(complex_json(a));
            pots.push_back({{"collar_end", q.collar_end()}, {"coeffs", coeffs}});
        }
        je["potentials"] = pots;
        edges.push_back(je);
    }
    doc["edges"] = edges;
    json gamma = json::array();
    for (const auto& f : c.gamma) {
        json rows = json::array();
        for (const auto& row : f.rows) {
            json r = json::array();
            for (cplx z : row)
                r.push_back(complex_json(z));
            rows.push_back(r);
        }
        gamma.push_back(rows);
    }
    doc["gamma"] = gamma;
    doc["convention"] = c.convention == LeadingConvention::FirstAbsorbsVandermonde ? "first" : "last";
    if (c.grid)
        doc["grid"] = grid_json(*c.grid);
    const RunParams& r = c.params;
    json p;
    p["s"] = r.s;
    p["k"] = r.k;
    p["N"] = r.N;
    p["edge"] = r.edge;
    p["sources"] = r.sources;
    p["tolerance"] = r.tolerance;
    p["interval"] = {r.interval_from, r.interval_to};
    p["scan_points"] = r.scan_points;
    p["refine_tol"] = r.refine_tol;
    p["arg_rho"] = r.arg_rho;
    p["rho_samples"] = r.rho_samples;
    p["x_probe"] = r.x_probe;
    p["rtol"] = r.integration.rtol;
    p["atol"] = r.integration.atol;
    p["max_steps"] = r.integration.max_steps;
    doc["params"] = p;
    return doc.dump(2) + "\n";
}

}  // namespace starweyl
