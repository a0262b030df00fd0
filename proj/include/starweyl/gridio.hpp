#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "starweyl/reconstruct.hpp"

namespace starweyl {

/// Lossless text form of a double (17 significant digits).
std::string format_double(double v);

struct CsvTable {
    std::string manifest;  // written as "# <manifest>"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

void write_csv(std::ostream& out, const CsvTable& table);
/// Throws Error(IoError) on ragged or empty input.
CsvTable read_csv(std::istream& in);

/// Column stems "<prefix>_k<k>_<inner><mu>" for 1 <= k < mu <= n.
std::vector<std::string> upper_entry_names(const std::string& prefix, int n, const std::string& inner);

/// Appends re/im cells of the strict upper part of m in upper_entry_names order.
void append_upper(std::vector<std::string>& row, const Eigen::MatrixXcd& m);
void append_nan_upper(std::vector<std::string>& row, int n);
void append_complex(std::vector<std::string>& row, cplx z);

/// Reads a weyl command CSV back into a WeylGrid; a row whose flag is not
/// "ok" is marked flagged.
WeylGrid read_weyl_csv(std::istream& in, int order);
WeylGrid read_weyl_csv(const std::string& path, int order);

}  // namespace starweyl
