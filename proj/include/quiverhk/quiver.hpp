#pragma once

#include <cstdint>
#include <vector>

#include "quiverhk/matrix_engine.hpp"

namespace quiverhk {

// Full-flag quiver 0 -> C^1 -> C^2 -> ... -> C^n with maps alpha_i : C^i -> C^{i+1}
// and beta_i : C^{i+1} -> C^i.  alpha[0] (1x0) and beta[0] (0x1) are the empty maps
// out of V_0 = 0, kept so that every node formula is uniform.
struct Quiver {
    int n = 1;
    std::vector<CMatrix> alpha;
    std::vector<CMatrix> beta;

    static Quiver zero(int n);

    // Throws ShapeError unless every edge has the full-flag shape and finite entries.
    void validate() const;

    double norm() const;
};

// Levels of the moment-map equations; lambda_c(m-1) belongs to node m (m = 1..n-1).
struct MomentScalars {
    CVector lambda_c;
    Eigen::VectorXd lambda_r;

    static MomentScalars zero(int n);
    int nodes() const { return static_cast<int>(lambda_c.size()); }
    cplx c(int m) const { return lambda_c(m - 1); }
    double r(int m) const { return lambda_r(m - 1); }
};

// alpha_{m-1} beta_{m-1}, an m x m operator on V_m (m = 1..n).  Node n gives X.
CMatrix node_operator(const Quiver& q, int m);

// X = alpha_{n-1} beta_{n-1}.
CMatrix top_product(const Quiver& q);

// alpha_{m-1} beta_{m-1} - beta_m alpha_m for m = 1..n-1.
CMatrix complex_defect(const Quiver& q, int m);

// alpha_{m-1} alpha_{m-1}^* - beta_{m-1}^* beta_{m-1} + beta_m beta_m^* - alpha_m^* alpha_m.
CMatrix real_defect(const Quiver& q, int m);

struct ScalarInference {
    MomentScalars scalars;
    double offdiag_residual = 0.0;
};

ScalarInference infer_scalars(const Quiver& q);

double complex_residual(const Quiver& q, const MomentScalars& s);
double real_residual(const Quiver& q, const MomentScalars& s);

// alpha -> u alpha + v beta^*,  beta -> -v alpha^* + u beta.
Quiver su2_act(const Quiver& q, cplx u, cplx v);

// The same substitution without the unit-norm check.
Quiver su2_substitute(const Quiver& q, cplx u, cplx v);

// g[i-1] acts on V_i, i = 1..n:  alpha_i -> g_{i+1} alpha_i g_i^{-1},
// beta_i -> g_i beta_i g_{i+1}^{-1}.
Quiver gauge_act(const Quiver& q, const std::vector<CMatrix>& g);

// alpha_{n-1}...alpha_{n-k} beta_{n-k}...beta_{n-1}; k = n gives the zero matrix.
CMatrix xk_matrix(const Quiver& q, int k);

double xk_recursion_residual(const Quiver& q, const MomentScalars& s);
double characteristic_residual(const Quiver& q, const MomentScalars& s);

// nu_i = lambda^C_i + ... + lambda^C_{n-1}, for i = 1..n (nu_n = 0).
CVector partial_sums_from(const MomentScalars& s);

CVector kappa_spectrum(const MomentScalars& s, int n);

Quiver random_complex_solution(int n, const CVector& lambda_c, std::uint64_t seed);

Quiver quiver_from_nilpotent(const CMatrix& x, double tol = 1e-8);

}  // namespace quiverhk
