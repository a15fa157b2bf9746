#pragma once

#include <array>
#include <string>

#include "quiverhk/balancer.hpp"

namespace quiverhk {

enum class PhiMethod { Closed2, Closed3, Recursive, Balancer };

PhiMethod parse_phi_method(const std::string& name);
std::string to_string(PhiMethod m);

// Which sign the B-equation of the triangular recursion carries.
//   Printed:          Phi_{n-1}(Y_B) = i (B^-1 A (B^-1 A)^* - (AB)^* AB)
//   MomentConsistent: the opposite sign, which is what a balanced quiver obeys
enum class BConvention { Printed, MomentConsistent };

struct PhiOptions {
    double tol = 1e-8;                       // nilpotency / triangularization
    BalanceParams balance{};                 // used by the Balancer method and fall-backs
    BConvention convention = BConvention::Printed;
};

struct PhiResult {
    CMatrix phi;
    PhiMethod method = PhiMethod::Balancer;
    double skew_residual = 0.0;   // ||phi + phi^*||
    double trace_residual = 0.0;  // |tr phi|
    double solver_residual = 0.0; // balancer or Newton residual, 0 for closed forms
    int iterations = 0;
};

PhiResult phi_n_detailed(const CMatrix& x, PhiMethod method, const PhiOptions& opts = {});
CMatrix phi_n(const CMatrix& x, PhiMethod method = PhiMethod::Balancer, const PhiOptions& opts = {});

// The n = 2 closed form i (X X^* - X^* X) / ||X||_F.
CMatrix phi2_closed(const CMatrix& x);

struct Phi3Closed {
    CMatrix phi;
    double alpha;
    cplx beta;
    double gamma;
    double delta;
};

// Closed form for X = [[0, A^2], [0, 0]], A = [[a, b], [0, c]].
Phi3Closed phi3_closed(double a, cplx b, double c);

// X = [[0, A^2], [0, 0]] for A upper triangular of size n-1.
CMatrix block_nilpotent(const CMatrix& a);

struct BSolve {
    CMatrix B;
    double residual = 0.0;
    int iterations = 0;
};

// Upper triangular B with positive diagonal matching the Phi_{n-1} equation for A.
BSolve recursive_B_solve(const CMatrix& a, BConvention convention = BConvention::Printed,
                         const BalanceParams& fallback = {});

// u^2 eta + i u v Phi(eta) - v^2 eta^*.
CMatrix su2_rotate_nilpotent(const CMatrix& eta, cplx u, cplx v,
                             PhiMethod method = PhiMethod::Balancer, const PhiOptions& opts = {});

struct TwistorQuadratic {
    std::array<CMatrix, 3> coeff;  // of u^2, uv, v^2
    CMatrix evaluate(cplx u, cplx v) const;
};

TwistorQuadratic twistor_section_of(const CMatrix& eta, PhiMethod method = PhiMethod::Balancer,
                                    const PhiOptions& opts = {});

// (X, zeta) -> (-X^* / conj(zeta)^2, -1 / conj(zeta)).
std::pair<CMatrix, cplx> nilcone_real_structure(const CMatrix& x, cplx zeta);

}  // namespace quiverhk
