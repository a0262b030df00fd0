#pragma once

#include <complex>
#include <span>
#include <vector>

namespace starweyl {

using cplx = std::complex<double>;

/// Polynomial that vanishes identically on [0, collar_end] and equals
/// sum_i a_i (x - collar_end)^i to the right of it.
class CollaredPolynomial {
public:
    CollaredPolynomial() = default;
    CollaredPolynomial(double collar_end, std::vector<cplx> coeffs);

    double collar_end() const { return collar_end_; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }
    bool is_zero() const;

    cplx operator()(double x) const { return derivative(x, 0); }
    cplx derivative(double x, int order) const;

private:
    double collar_end_ = 0.0;
    std::vector<cplx> coeffs_;
};

/// One edge of the star. Singular coefficients and potentials are indexed by
/// mu = 0..order-2; the edge is parameterized so x = 0 is the boundary vertex.
struct EdgeModel {
    int index = 1;
    double length = 1.0;
    int order = 2;
    std::vector<cplx> nu;
    std::vector<CollaredPolynomial> potentials;
    double collar = 0.1;

    /// Throws Error(InvalidArgument) when sizes, lengths or collars are off.
    void validate() const;

    /// nu_mu / x^(n - mu) + q_mu(x)
    cplx coefficient(int mu, double x) const;
};

struct IndicialPolynomial {
    int order = 0;
    std::vector<cplx> falling;   // nu_0..nu_n in the falling-factorial basis
    std::vector<cplx> monomial;  // d_0..d_n, d_n = 1
};

struct ExponentSet {
    std::vector<cplx> roots;    // ascending real part
    std::vector<cplx> leading;  // c_{k0}
    double theta = 0.0;
    cplx vandermonde;
};

/// How the product constraint prod_k c_{k0} = 1/V is distributed.
enum class LeadingConvention {
    FirstAbsorbsVandermonde,  // c_{10} = 1/V, others 1
    LastAbsorbsVandermonde,   // c_{n0} = 1/V, others 1
};

inline constexpr double kAdmissibilityTolerance = 1e-8;

IndicialPolynomial build_indicial(int order, std::span<const cplx> nu);
IndicialPolynomial build_indicial(const EdgeModel& edge);

cplx indicial_eval(const IndicialPolynomial& p, cplx xi);

/// Durand-Kerner iteration on a monic polynomial given by d_0..d_n.
std::vector<cplx> polynomial_roots(std::span<const cplx> monic, double tol = 1e-13,
                                   int max_iter = 500);

ExponentSet solve_exponents(const IndicialPolynomial& p,
                            LeadingConvention convention = LeadingConvention::FirstAbsorbsVandermonde);

/// Edge together with its validated indicial data.
struct PreparedEdge {
    EdgeModel edge;
    IndicialPolynomial indicial;
    ExponentSet exponents;
};

/// Validates the edge and solves its indicial polynomial; admissibility
/// failures are rethrown with the edge index in the message.
PreparedEdge prepare_edge(EdgeModel edge,
                          LeadingConvention convention = LeadingConvention::FirstAbsorbsVandermonde);

/// Throws AdmissibilityError for the first failed exclusion test.
void check_admissible(std::span<const cplx> sorted_roots, int order,
                      double tol = kAdmissibilityTolerance);

}  // namespace starweyl
