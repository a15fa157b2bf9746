#pragma once

#include <cstdint>
#include <vector>

#include "quiverhk/quiver.hpp"

namespace quiverhk {

// Bidiagonal quiver data: nu[k-1](i-1) = nu_i^k and mu[k-1](i-1) = mu_i^k for
// 1 <= i <= k <= n-1.  alpha_k carries nu^k on its subdiagonal, beta_k carries
// mu^k on its superdiagonal.
struct HypertoricQuiver {
    int n = 1;
    std::vector<CVector> nu;
    std::vector<CVector> mu;

    static HypertoricQuiver zero(int n);
    void validate() const;
    cplx nu_at(int i, int k) const { return nu[k - 1](i - 1); }
    cplx mu_at(int i, int k) const { return mu[k - 1](i - 1); }
};

Quiver hypertoric_build(const HypertoricQuiver& hq);

bool hk_stable(const HypertoricQuiver& hq);

// Moment levels of the bidiagonal quiver, computed from the diagonal entries.
MomentScalars hypertoric_scalars(const HypertoricQuiver& hq);

// Data solving both moment equations at the given levels, with random phases.
HypertoricQuiver balanced_hypertoric(int n, const CVector& lambda_c, const Eigen::VectorXd& lambda_r,
                                     std::uint64_t seed);

}  // namespace quiverhk
