#pragma once

#include <complex>
#include <vector>

#include "starweyl/exponents.hpp"

namespace starweyl {

/// Ordering of the n-th roots of unity R_1..R_n with
/// Re(rho R_1) < ... < Re(rho R_n) for rho on the ray arg_rho.
struct SectorFrame {
    int order = 0;
    int sector = 0;            // floor(arg_rho * n / pi)
    std::vector<int> eta;      // R_k = exp(2 pi i eta_k / n)
    std::vector<cplx> roots;
    double arg_rho = 0.0;
};

struct OmegaConstants {
    std::vector<cplx> big;    // Omega_0..Omega_n
    std::vector<cplx> small;  // omega_1..omega_n
};

inline constexpr double kSectorTieTolerance = 1e-9;
inline constexpr double kOmegaFloor = 1e-12;

SectorFrame sector_frame(int order, double arg_rho);

/// rho^mu with arg rho taken in (-pi, pi].
cplx complex_power(cplx rho, cplx mu);

/// R_k^mu := exp(2 pi i mu eta_k / n); k is 1-based.
cplx root_power(const SectorFrame& frame, int k, cplx mu);

OmegaConstants omega_constants(const SectorFrame& frame, const ExponentSet& exps);

}  // namespace starweyl
