#pragma once

#include <Eigen/Dense>
#include <complex>

namespace starweyl {

/// Fundamental-system values at one point: values(k, nu) = S_k^{(nu)}(x, lambda),
/// k = 0..n-1 (0-based row for solution k+1).
struct BasisValues {
    int edge = 0;
    std::complex<double> lambda;
    double x = 0.0;
    Eigen::MatrixXcd values;
    double wronskian_drift = 0.0;
};

}  // namespace starweyl
