#include "quiverhk/hypertoric.hpp"

#include <cmath>

namespace quiverhk {

HypertoricQuiver HypertoricQuiver::zero(int n)
{
    if (n < 1)
        throw ShapeError("HypertoricQuiver::zero: n must be at least 1");
    HypertoricQuiver hq;
    hq.n = n;
    for (int k = 1; k < n; ++k) {
        hq.nu.push_back(CVector::Zero(k));
        hq.mu.push_back(CVector::Zero(k));
    }
    return hq;
}

void HypertoricQuiver::validate() const
{
    if (n < 1)
        throw ShapeError("hypertoric: n must be at least 1");
    if (static_cast<int>(nu.size()) != n - 1 || static_cast<int>(mu.size()) != n - 1)
        throw ShapeError("hypertoric: expected " + std::to_string(n - 1) + " levels of nu and mu");
    for (int k = 1; k < n; ++k) {
        if (nu[k - 1].size() != k || mu[k - 1].size() != k)
            throw ShapeError("hypertoric: level " + std::to_string(k) + " must have " +
                             std::to_string(k) + " entries");
        if (!all_finite(nu[k - 1]) || !all_finite(mu[k - 1]))
            throw ShapeError("hypertoric: non-finite entry at level " + std::to_string(k));
    }
}

Quiver hypertoric_build(const HypertoricQuiver& hq)
{
    hq.validate();
    Quiver q = Quiver::zero(hq.n);
    for (int k = 1; k < hq.n; ++k)
        for (int i = 1; i <= k; ++i) {
            q.alpha[k](i, i - 1) = hq.nu_at(i, k);
            q.beta[k](i - 1, i) = hq.mu_at(i, k);
        }
    return q;
}

bool hk_stable(const HypertoricQuiver& hq)
{
    hq.validate();
    for (int k = 1; k < hq.n; ++k)
        for (int i = 1; i <= k; ++i)
            if (!(std::abs(hq.nu_at(i, k)) + std::abs(hq.mu_at(i, k)) > 0))
                return false;
    return true;
}

MomentScalars hypertoric_scalars(const HypertoricQuiver& hq)
{
    hq.validate();
    MomentScalars s = MomentScalars::zero(hq.n);
    for (int m = 1; m < hq.n; ++m) {
        cplx c = 0;
        double r = 0;
        for (int i = 1; i < m; ++i) {
            c += hq.nu_at(i, m - 1) * hq.mu_at(i, m - 1);
            r += std::norm(hq.nu_at(i, m - 1)) - std::norm(hq.mu_at(i, m - 1));
        }
        for (int i = 1; i <= m; ++i) {
            c -= hq.nu_at(i, m) * hq.mu_at(i, m);
            r += std::norm(hq.mu_at(i, m)) - std::norm(hq.nu_at(i, m));
        }
        s.lambda_c(m - 1) = c / static_cast<double>(m);
        s.lambda_r(m - 1) = r / m;
    }
    return s;
}

HypertoricQuiver balanced_hypertoric(int n, const CVector& lambda_c, const Eigen::VectorXd& lambda_r,
                                     std::uint64_t seed)
{
    if (lambda_c.size() != n - 1 || lambda_r.size() != n - 1)
        throw ShapeError("balanced_hypertoric: expected " + std::to_string(n - 1) + " levels");
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    HypertoricQuiver hq = HypertoricQuiver::zero(n);
    for (int k = 1; k < n; ++k)
        for (int i = 1; i <= k; ++i) {
            // nu mu = p and |nu|^2 - |mu|^2 = r, both partial sums ending at level k
            cplx p = 0;
            double r = 0;
            for (int t = k - i + 1; t <= k; ++t) {
                p -= lambda_c(t - 1);
                r -= lambda_r(t - 1);
            }
            const double root = std::sqrt(r * r + 4.0 * std::norm(p));
            const double nu2 = r >= 0 ? 0.5 * (r + root) : 2.0 * std::norm(p) / (root - r);
            const double mu2 = std::max(0.0, nu2 - r);
            const double phase = angle(rng);
            cplx nu = 0, mu = 0;
            if (nu2 > 0) {
                nu = std::polar(std::sqrt(nu2), phase);
                mu = std::polar(std::sqrt(mu2), std::arg(p) - phase);
            } else {
                mu = std::polar(std::sqrt(mu2), phase);
            }
            hq.nu[k - 1](i - 1) = nu;
            hq.mu[k - 1](i - 1) = mu;
        }
    return hq;
}

}  // namespace quiverhk
