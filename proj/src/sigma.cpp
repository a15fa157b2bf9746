#include "quiverhk/sigma.hpp"

#include <cmath>

namespace quiverhk {

namespace {

// (u alpha_{n-1} + v beta_{n-1}^*) ... (u alpha_j + v beta_j^*), an n x j matrix.
CMatrix edge_chain(const Quiver& q, int j, cplx u, cplx v)
{
    CMatrix m = CMatrix::Identity(q.n, q.n);
    for (int i = q.n - 1; i >= j; --i)
        m = m * (u * q.alpha[i] + v * q.beta[i].adjoint());
    return m;
}

CVector t_value(const std::array<CVector, 3>& t, cplx u, cplx v)
{
    return u * u * t[0] + u * v * t[1] + v * v * t[2];
}

CMatrix k_value(const std::array<CMatrix, 3>& k, cplx u, cplx v)
{
    return u * u * k[0] + u * v * k[1] + v * v * k[2];
}

double coeff_scale(const std::vector<CVector>& c)
{
    double s = 0;
    for (const auto& v : c)
        s += v.norm();
    return s;
}

// Coefficients of a product of linear forms a_t u + b_t v.
std::vector<cplx> expand_linear(const std::vector<std::pair<cplx, cplx>>& factors)
{
    std::vector<cplx> poly{cplx(1, 0)};
    for (const auto& [a, b] : factors) {
        std::vector<cplx> next(poly.size() + 1, cplx(0, 0));
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += a * poly[k];
            next[k + 1] += b * poly[k];
        }
        poly = std::move(next);
    }
    return poly;
}

}  // namespace

SigmaSection SigmaSection::zero(int n)
{
    SigmaSection s;
    s.n = n;
    for (int c = 0; c < 3; ++c) {
        s.rhoK[c] = CMatrix::Zero(n, n);
        s.rhoT[c] = CVector::Zero(n - 1);
    }
    for (int j = 1; j < n; ++j)
        s.rho.emplace_back(degree(n, j) + 1, CVector::Zero(binomial(n, j)));
    return s;
}

void SigmaSection::validate() const
{
    if (n < 1)
        throw ShapeError("section: n must be at least 1");
    for (int c = 0; c < 3; ++c) {
        if (rhoK[c].rows() != n || rhoK[c].cols() != n)
            throw ShapeError("section: rhoK coefficients must be n x n");
        if (rhoT[c].size() != n - 1)
            throw ShapeError("section: rhoT coefficients must have n-1 entries");
    }
    if (static_cast<int>(rho.size()) != n - 1)
        throw ShapeError("section: expected n-1 Plücker components");
    for (int j = 1; j < n; ++j) {
        if (static_cast<int>(rho[j - 1].size()) != degree(n, j) + 1)
            throw ShapeError("section: rho_" + std::to_string(j) + " must have " +
                             std::to_string(degree(n, j) + 1) + " coefficients");
        for (const auto& c : rho[j - 1])
            if (c.size() != binomial(n, j))
                throw ShapeError("section: rho_" + std::to_string(j) + " coefficient has the wrong length");
    }
}

SigmaSection sigma(const Quiver& q)
{
    q.validate();
    const int n = q.n;
    SigmaSection s = SigmaSection::zero(n);
    const CMatrix& a = q.alpha[n - 1];
    const CMatrix& b = q.beta[n - 1];
    if (n > 1) {
        s.rhoK[0] = trace_free(CMatrix(a * b));
        s.rhoK[1] = trace_free(CMatrix(b.adjoint() * b - a * a.adjoint()));
        s.rhoK[2] = trace_free(CMatrix(-b.adjoint() * a.adjoint()));
    }
    const MomentScalars sc = infer_scalars(q).scalars;
    s.rhoT[0] = sc.lambda_c;
    s.rhoT[1] = -sc.lambda_r.cast<cplx>();
    s.rhoT[2] = -sc.lambda_c.conjugate();

    const cplx check_points[2][2] = {{cplx(1, 0), cplx(0.37, -0.61)}, {cplx(0.6, 0.2), cplx(-0.3, 0.7)}};
    for (int j = 1; j < n; ++j) {
        const int d = SigmaSection::degree(n, j);
        const int count = d + 1;
        std::vector<CVector> values;
        for (int k = 0; k < count; ++k) {
            const cplx w = std::polar(1.0, 2.0 * M_PI * k / count);
            values.push_back(plucker(edge_chain(q, j, 1.0, w)));
        }
        auto& coeff = s.rho[j - 1];
        for (int m = 0; m < count; ++m) {
            CVector acc = CVector::Zero(values[0].size());
            for (int k = 0; k < count; ++k)
                acc += std::polar(1.0, -2.0 * M_PI * k * m / count) * values[k];
            coeff[m] = acc / static_cast<double>(count);
        }
        const double scale = 1.0 + coeff_scale(coeff);
        for (const auto& pt : check_points) {
            const CVector direct = plucker(edge_chain(q, j, pt[0], pt[1]));
            CVector poly = CVector::Zero(direct.size());
            for (int m = 0; m < count; ++m)
                poly += std::pow(pt[0], d - m) * std::pow(pt[1], m) * coeff[m];
            const double err = (poly - direct).norm() / scale;
            if (!(err <= 1e-9))
                throw InterpolationError("sigma: interpolation residual " + std::to_string(err) +
                                         " for rho_" + std::to_string(j));
        }
    }
    return s;
}

SectionValue evaluate_section(const SigmaSection& s, cplx u, cplx v)
{
    if (u == cplx(0, 0) && v == cplx(0, 0))
        throw InputError("evaluate_section: (u, v) = (0, 0) is not a point of P^1");
    SectionValue out;
    out.K = k_value(s.rhoK, u, v);
    out.T = t_value(s.rhoT, u, v);
    for (int j = 1; j < s.n; ++j) {
        const int d = SigmaSection::degree(s.n, j);
        const auto& coeff = s.rho[j - 1];
        CVector acc = CVector::Zero(coeff[0].size());
        for (int m = 0; m <= d; ++m)
            acc += std::pow(u, d - m) * std::pow(v, m) * coeff[m];
        out.rho.push_back(acc);
    }
    return out;
}

SectionValue evaluate_direct(const Quiver& q, cplx u, cplx v)
{
    q.validate();
    SectionValue out;
    const int n = q.n;
    const CMatrix a = u * q.alpha[n - 1] + v * q.beta[n - 1].adjoint();
    const CMatrix b = -v * q.alpha[n - 1].adjoint() + u * q.beta[n - 1];
    out.K = n > 1 ? trace_free(CMatrix(a * b)) : CMatrix::Zero(1, 1);
    const MomentScalars sc = infer_scalars(q).scalars;
    out.T = u * u * sc.lambda_c - u * v * sc.lambda_r.cast<cplx>() - v * v * sc.lambda_c.conjugate();
    for (int j = 1; j < n; ++j)
        out.rho.push_back(plucker(edge_chain(q, j, u, v)));
    return out;
}

SigmaTilde sigma_tilde(const Quiver& q, cplx zeta)
{
    return {evaluate_section(sigma(q), 1.0, zeta), zeta};
}

double lemma59_residual(const Quiver& q, int k)
{
    q.validate();
    if (k < 1 || k > q.n - 1)
        throw ShapeError("lemma59_residual: k must lie in 1.." + std::to_string(q.n - 1));
    const ScalarInference inf = infer_scalars(q);
    if (complex_residual(q, inf.scalars) > 1e-8)
        throw PreconditionViolated("lemma59_residual: quiver does not satisfy the complex equations");
    const int n = q.n;
    CMatrix a = CMatrix::Identity(n, n);
    CMatrix b = CMatrix::Identity(n, n);
    for (int i = n - 1; i >= n - k; --i) {
        a = a * q.alpha[i];
        b = q.beta[i] * b;
    }
    const CVector p = plucker(a);
    const CVector w = plucker_covector(b);
    const CMatrix x = top_product(q);
    CMatrix prod = CMatrix::Identity(n, n);
    cplx shift = 0;
    for (int i = 0; i < k; ++i) {
        if (i > 0)
            shift += inf.scalars.c(n - i);
        CMatrix f = x;
        f.diagonal().array() += shift;
        prod = prod * f;
    }
    const CMatrix W = minor_matrix(prod, n - k);
    return (p * w.transpose() - W).norm() / (1.0 + W.norm());
}

std::vector<std::pair<cplx, cplx>> unit_samples(int count, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::pair<cplx, cplx>> out;
    for (int i = 0; i < count; ++i)
        out.push_back(random_su2(rng));
    return out;
}

double reality_residual(const SigmaSection& s)
{
    double r = 0;
    for (const auto& [u, v] : unit_samples(32, 0x5eed)) {
        const cplx ua = -std::conj(v);
        const cplx va = std::conj(u);
        const CMatrix k1 = k_value(s.rhoK, u, v);
        const CMatrix k2 = k_value(s.rhoK, ua, va);
        const CVector t1 = t_value(s.rhoT, u, v);
        const CVector t2 = t_value(s.rhoT, ua, va);
        r = std::max(r, (k2 + k1.adjoint()).norm());
        r = std::max(r, (t2 + t1.conjugate()).norm());
    }
    return r;
}

bool flag_check_values(const std::vector<CVector>& rho, int n, double tol)
{
    std::vector<CMatrix> planes;
    for (int j = 1; j < n; ++j) {
        const CVector& w = rho[j - 1];
        const double nrm = w.norm();
        if (!(nrm > tol))
            throw ZeroComponent(j, "flag_check: component rho_" + std::to_string(j) + " vanishes");
        const CMatrix map = wedge_map(CVector(w / nrm), j, n);
        const CMatrix ker = null_space(map, tol);
        if (ker.cols() != j)
            return false;
        planes.push_back(ker);
    }
    for (int j = 1; j + 1 < n; ++j) {
        const CVector next = rho[j] / rho[j].norm();
        for (Eigen::Index c = 0; c < planes[j - 1].cols(); ++c)
            if (wedge_vector(next, j + 1, CVector(planes[j - 1].col(c))).norm() > tol)
                return false;
    }
    return true;
}

bool flag_check(const SigmaSection& s, cplx u, cplx v, double tol)
{
    return flag_check_values(evaluate_section(s, u, v).rho, s.n, tol);
}

SigmaSection hypertoric_sigma(const HypertoricQuiver& hq)
{
    hq.validate();
    const int n = hq.n;
    SigmaSection s = SigmaSection::zero(n);
    if (n > 1) {
        for (int i = 1; i < n; ++i) {
            const cplx nu = hq.nu_at(i, n - 1);
            const cplx mu = hq.mu_at(i, n - 1);
            s.rhoK[0](i, i) = nu * mu;
            s.rhoK[1](i, i) = std::norm(mu) - std::norm(nu);
            s.rhoK[2](i, i) = -std::conj(nu * mu);
        }
        for (auto& c : s.rhoK)
            c = trace_free(c);
    }
    const MomentScalars sc = hypertoric_scalars(hq);
    s.rhoT[0] = sc.lambda_c;
    s.rhoT[1] = -sc.lambda_r.cast<cplx>();
    s.rhoT[2] = -sc.lambda_c.conjugate();
    for (int j = 1; j < n; ++j) {
        std::vector<std::pair<cplx, cplx>> factors;
        for (int k = j; k < n; ++k)
            for (int i = k - j + 1; i <= k; ++i)
                factors.emplace_back(hq.nu_at(i, k), std::conj(hq.mu_at(i, k)));
        const auto poly = expand_linear(factors);
        const long last = binomial(n, j) - 1;  // e_{n-j+1} ^ ... ^ e_n
        for (std::size_t m = 0; m < poly.size(); ++m)
            s.rho[j - 1][m](last) = poly[m];
    }
    return s;
}

double value_distance(const SectionValue& a, const SectionValue& b)
{
    double d = std::max((a.K - b.K).norm(), (a.T - b.T).norm());
    for (std::size_t j = 0; j < a.rho.size(); ++j)
        d = std::max(d, (a.rho[j] - b.rho[j]).norm());
    return d;
}

double section_distance(const SigmaSection& a, const SigmaSection& b)
{
    if (a.n != b.n)
        throw ShapeError("section_distance: sections have different n");
    double d = 0;
    for (int c = 0; c < 3; ++c) {
        d = std::max(d, (a.rhoK[c] - b.rhoK[c]).norm());
        d = std::max(d, (a.rhoT[c] - b.rhoT[c]).norm());
    }
    for (std::size_t j = 0; j < a.rho.size(); ++j)
        for (std::size_t m = 0; m < a.rho[j].size(); ++m)
            d = std::max(d, (a.rho[j][m] - b.rho[j][m]).norm());
    return d;
}

}  // namespace quiverhk
