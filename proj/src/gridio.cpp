#include "starweyl/gridio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "starweyl/errors.hpp"

namespace starweyl {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out << ',';
        out << cells[i];
    }
    out << '\n';
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string& cell) {
    // strtod rather than stod: subnormal values must read back exactly.
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (cell.empty() || end != begin + cell.size())
        throw Error(ErrorCode::IoError, "not a number in CSV: '" + cell + "'");
    return v;
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
    if (!table.manifest.empty())
        out << "# " << table.manifest << '\n';
    write_row(out, table.header);
    for (const auto& row : table.rows)
        write_row(out, row);
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (!have_header && t.manifest.empty())
                t.manifest = line.size() > 2 ? line.substr(2) : "";
            continue;
        }
        auto cells = split(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(ErrorCode::IoError, "ragged CSV row");
        t.rows.push_back(std::move(cells));
    }
    if (!have_header)
        throw Error(ErrorCode::IoError, "CSV input has no header");
    return t;
}

std::vector<std::string> upper_entry_names(const std::string& prefix, int n, const std::string& inner) {
    std::vector<std::string> out;
    for (int k = 1; k < n; ++k)
        for (int mu = k + 1; mu <= n; ++mu)
            out.push_back(prefix + "_k" + std::to_string(k) + "_" + inner + std::to_string(mu));
    return out;
}

void append_complex(std::vector<std::string>& row, cplx z) {
    row.push_back(format_double(z.real()));
    row.push_back(format_double(z.imag()));
}

void append_upper(std::vector<std::string>& row, const Eigen::MatrixXcd& m) {
    for (Eigen::Index k = 0; k < m.rows(); ++k)
        for (Eigen::Index mu = k + 1; mu < m.cols(); ++mu)
            append_complex(row, m(k, mu));
}

void append_nan_upper(std::vector<std::string>& row, int n) {
    for (int i = 0; i < n * (n - 1); ++i)
        row.emplace_back("nan");
}

WeylGrid read_weyl_csv(std::istream& in, int order) {
    const CsvTable t = read_csv(in);
    const int re = t.column("lambda_re");
    const int im = t.column("lambda_im");
    const int flag = t.column("flag");
    if (re < 0 || im < 0 || flag < 0)
        throw Error(ErrorCode::IoError, "weyl CSV lacks lambda or flag columns");

    // The source vertex is encoded in the entry names, M_s<s>_k1_mu2_re.
    int s = 0;
    for (const auto& h : t.header) {
        if (h.rfind("M_s", 0) == 0) {
            s = std::stoi(h.substr(3));
            break;
        }
    }
    if (s < 1)
        throw Error(ErrorCode::IoError, "weyl CSV has no M_s columns");

    const auto names = upper_entry_names("M_s" + std::to_string(s), order, "mu");
    std::vector<std::pair<int, int>> cols;
    for (const auto& name : names) {
        const int a = t.column(name + "_re");
        const int b = t.column(name + "_im");
        if (a < 0 || b < 0)
            throw Error(ErrorCode::IoError, "weyl CSV lacks column " + name);
        cols.emplace_back(a, b);
    }

    WeylGrid g;
    g.s = s;
    for (const auto& row : t.rows) {
        g.lambdas.emplace_back(parse_double(row[re]), parse_double(row[im]));
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(order, order);
        bool finite = true;
        std::size_t c = 0;
        for (int k = 0; k < order; ++k)
            for (int mu = k + 1; mu < order; ++mu, ++c) {
                const cplx z(parse_double(row[cols[c].first]), parse_double(row[cols[c].second]));
                finite = finite && std::isfinite(z.real()) && std::isfinite(z.imag());
                m(k, mu) = z;
            }
        const bool flagged = row[flag] != "ok";
        g.flagged.push_back(flagged || !finite);
        if (finite)
            g.matrices.emplace_back(std::move(m));
        else
            g.matrices.emplace_back(std::nullopt);
    }
    return g;
}

WeylGrid read_weyl_csv(const std::string& path, int order) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    return read_weyl_csv(in, order);
}

}  // namespace starweyl
