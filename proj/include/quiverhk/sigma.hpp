#pragma once

#include <array>
#include <utility>
#include <vector>

#include "quiverhk/hypertoric.hpp"
#include "quiverhk/quiver.hpp"

namespace quiverhk {

// Homogeneous polynomial sections in (u, v).  Coefficient k of a degree-d
// component multiplies u^{d-k} v^k.
struct SigmaSection {
    int n = 1;
    std::array<CMatrix, 3> rhoK;
    std::array<CVector, 3> rhoT;
    std::vector<std::vector<CVector>> rho;  // rho[j-1] has j(n-j)+1 Plücker coefficients

    static SigmaSection zero(int n);
    static int degree(int n, int j) { return j * (n - j); }
    void validate() const;
};

struct SectionValue {
    CMatrix K;
    CVector T;
    std::vector<CVector> rho;  // rho[j-1] in Λ^j C^n
};

SigmaSection sigma(const Quiver& q);

SectionValue evaluate_section(const SigmaSection& s, cplx u, cplx v);

// Direct evaluation from the edge combinations u alpha + v beta^*, no interpolation.
SectionValue evaluate_direct(const Quiver& q, cplx u, cplx v);

struct SigmaTilde {
    SectionValue value;
    cplx zeta;
};

SigmaTilde sigma_tilde(const Quiver& q, cplx zeta);

double lemma59_residual(const Quiver& q, int k);

// Fixed deterministic samples of unit (u, v).
std::vector<std::pair<cplx, cplx>> unit_samples(int count, std::uint64_t seed);

double reality_residual(const SigmaSection& s);

// Decomposability of each rho_j and containment of the j-plane in the (j+1)-plane.
bool flag_check(const SigmaSection& s, cplx u, cplx v, double tol = 1e-8);
bool flag_check_values(const std::vector<CVector>& rho, int n, double tol = 1e-8);

SigmaSection hypertoric_sigma(const HypertoricQuiver& hq);

// Largest coefficient difference over all components.
double section_distance(const SigmaSection& a, const SigmaSection& b);
double value_distance(const SectionValue& a, const SectionValue& b);

}  // namespace quiverhk
