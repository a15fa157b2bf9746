#include "quiverhk/quiver.hpp"

#include <algorithm>
#include <numeric>

namespace quiverhk {

namespace {

// Eigen is happy with empty inner dimensions, but be explicit about the shape.
CMatrix mul(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() == 0)
        return CMatrix::Zero(a.rows(), b.cols());
    return a * b;
}

void check_node(const Quiver& q, int m, int lo, int hi, const char* who)
{
    if (m < lo || m > hi)
        throw ShapeError(std::string(who) + ": node " + std::to_string(m) + " outside " +
                         std::to_string(lo) + ".." + std::to_string(hi) + " (n = " +
                         std::to_string(q.n) + ")");
}

}  // namespace

Quiver Quiver::zero(int n)
{
    if (n < 1)
        throw ShapeError("Quiver::zero: n must be at least 1");
    Quiver q;
    q.n = n;
    for (int i = 0; i < n; ++i) {
        q.alpha.push_back(CMatrix::Zero(i + 1, i));
        q.beta.push_back(CMatrix::Zero(i, i + 1));
    }
    return q;
}

void Quiver::validate() const
{
    if (n < 1)
        throw ShapeError("quiver: n must be at least 1");
    if (static_cast<int>(alpha.size()) != n || static_cast<int>(beta.size()) != n)
        throw ShapeError("quiver: expected " + std::to_string(n - 1) + " alpha and beta maps");
    for (int i = 0; i < n; ++i) {
        if (alpha[i].rows() != i + 1 || alpha[i].cols() != i)
            throw ShapeError("quiver: alpha_" + std::to_string(i) + " must be " +
                             std::to_string(i + 1) + "x" + std::to_string(i));
        if (beta[i].rows() != i || beta[i].cols() != i + 1)
            throw ShapeError("quiver: beta_" + std::to_string(i) + " must be " +
                             std::to_string(i) + "x" + std::to_string(i + 1));
        if (!all_finite(alpha[i]) || !all_finite(beta[i]))
            throw ShapeError("quiver: non-finite entry at edge " + std::to_string(i));
    }
}

double Quiver::norm() const
{
    double s = 0;
    for (int i = 1; i < n; ++i)
        s += alpha[i].squaredNorm() + beta[i].squaredNorm();
    return std::sqrt(s);
}

MomentScalars MomentScalars::zero(int n)
{
    MomentScalars s;
    s.lambda_c = CVector::Zero(std::max(0, n - 1));
    s.lambda_r = Eigen::VectorXd::Zero(std::max(0, n - 1));
    return s;
}

// ---------------------------------------------------------------------------

CMatrix node_operator(const Quiver& q, int m)
{
    check_node(q, m, 1, q.n, "node_operator");
    return mul(q.alpha[m - 1], q.beta[m - 1]);
}

CMatrix top_product(const Quiver& q)
{
    return node_operator(q, q.n);
}

CMatrix complex_defect(const Quiver& q, int m)
{
    check_node(q, m, 1, q.n - 1, "complex_defect");
    return node_operator(q, m) - q.beta[m] * q.alpha[m];
}

CMatrix real_defect(const Quiver& q, int m)
{
    check_node(q, m, 1, q.n - 1, "real_defect");
    const CMatrix& a0 = q.alpha[m - 1];
    const CMatrix& b0 = q.beta[m - 1];
    const CMatrix& a1 = q.alpha[m];
    const CMatrix& b1 = q.beta[m];
    return mul(a0, a0.adjoint()) - mul(b0.adjoint(), b0) + b1 * b1.adjoint() -
           a1.adjoint() * a1;
}

ScalarInference infer_scalars(const Quiver& q)
{
    ScalarInference out;
    out.scalars = MomentScalars::zero(q.n);
    for (int m = 1; m < q.n; ++m) {
        const CMatrix dc = complex_defect(q, m);
        const CMatrix dr = real_defect(q, m);
        out.scalars.lambda_c(m - 1) = dc.trace() / static_cast<double>(m);
        out.scalars.lambda_r(m - 1) = dr.trace().real() / m;
        out.offdiag_residual = std::max(
            {out.offdiag_residual, trace_free(dc).norm(), trace_free(dr).norm()});
    }
    return out;
}

double complex_residual(const Quiver& q, const MomentScalars& s)
{
    if (s.nodes() != q.n - 1)
        throw ShapeError("complex_residual: scalars do not match the quiver");
    double r = 0;
    for (int m = 1; m < q.n; ++m) {
        CMatrix d = complex_defect(q, m);
        d.diagonal().array() -= s.c(m);
        r = std::max(r, d.norm());
    }
    return r;
}

double real_residual(const Quiver& q, const MomentScalars& s)
{
    if (static_cast<int>(s.lambda_r.size()) != q.n - 1)
        throw ShapeError("real_residual: scalars do not match the quiver");
    double r = 0;
    for (int m = 1; m < q.n; ++m) {
        CMatrix d = real_defect(q, m);
        d.diagonal().array() -= s.r(m);
        r = std::max(r, d.norm());
    }
    return r;
}

// ---------------------------------------------------------------------------

Quiver su2_substitute(const Quiver& q, cplx u, cplx v)
{
    Quiver out = q;
    for (int i = 1; i < q.n; ++i) {
        out.alpha[i] = u * q.alpha[i] + v * q.beta[i].adjoint();
        out.beta[i] = -v * q.alpha[i].adjoint() + u * q.beta[i];
    }
    return out;
}

Quiver su2_act(const Quiver& q, cplx u, cplx v)
{
    const double unit = std::norm(u) + std::norm(v);
    if (std::abs(unit - 1.0) > 1e-12)
        throw InputError("su2_act: (u, v) is not a unit vector (|u|^2 + |v|^2 = " +
                         std::to_string(unit) + ")");
    return su2_substitute(q, u, v);
}

Quiver gauge_act(const Quiver& q, const std::vector<CMatrix>& g)
{
    if (static_cast<int>(g.size()) != q.n)
        throw ShapeError("gauge_act: expected " + std::to_string(q.n) + " gauge factors");
    std::vector<CMatrix> inv(q.n);
    for (int i = 1; i <= q.n; ++i) {
        const CMatrix& gi = g[i - 1];
        if (gi.rows() != i || gi.cols() != i)
            throw ShapeError("gauge_act: g_" + std::to_string(i) + " must be " +
                             std::to_string(i) + "x" + std::to_string(i));
        Eigen::JacobiSVD<CMatrix> svd(gi);
        const auto& sv = svd.singularValues();
        if (!(sv(i - 1) > 0) || sv(0) / sv(i - 1) > 1e12)
            throw InputError("gauge_act: g_" + std::to_string(i) + " is singular");
        inv[i - 1] = gi.inverse();
    }
    Quiver out = q;
    for (int i = 1; i < q.n; ++i) {
        out.alpha[i] = g[i] * q.alpha[i] * inv[i - 1];
        out.beta[i] = g[i - 1] * q.beta[i] * inv[i];
    }
    return out;
}

// ---------------------------------------------------------------------------

CMatrix xk_matrix(const Quiver& q, int k)
{
    check_node(q, k, 1, q.n, "xk_matrix");
    CMatrix a = CMatrix::Identity(q.n, q.n);
    CMatrix b = CMatrix::Identity(q.n, q.n);
    for (int i = q.n - 1; i >= q.n - k; --i) {
        a = mul(a, q.alpha[i]);
        b = mul(q.beta[i], b);
    }
    return mul(a, b);
}

namespace {

void require_complex_solution(const Quiver& q, const MomentScalars& s, const char* who)
{
    const double r = complex_residual(q, s);
    if (r > 1e-8)
        throw PreconditionViolated(std::string(who) + ": complex residual " + std::to_string(r) +
                                   " exceeds 1e-8");
}

}  // namespace

double xk_recursion_residual(const Quiver& q, const MomentScalars& s)
{
    require_complex_solution(q, s, "xk_recursion_residual");
    if (q.n < 2)
        return 0;
    const CMatrix x = top_product(q);
    double r = 0;
    cplx shift = 0;
    CMatrix xk = xk_matrix(q, 1);
    for (int k = 1; k < q.n; ++k) {
        shift += s.c(q.n - k);
        const CMatrix next = xk_matrix(q, k + 1);
        r = std::max(r, (xk * x - next + shift * xk).norm());
        xk = next;
    }
    return r;
}

CVector partial_sums_from(const MomentScalars& s)
{
    const int n = s.nodes() + 1;
    CVector nu = CVector::Zero(n);
    for (int i = n - 1; i >= 1; --i)
        nu(i - 1) = s.c(i) + nu(i);
    return nu;
}

double characteristic_residual(const Quiver& q, const MomentScalars& s)
{
    require_complex_solution(q, s, "characteristic_residual");
    const CMatrix x = top_product(q);
    const CVector nu = partial_sums_from(s);
    CMatrix p = x;
    for (int i = 1; i < q.n; ++i) {
        CMatrix f = x;
        f.diagonal().array() += nu(i - 1);
        p = p * f;
    }
    return p.norm() / (1.0 + std::pow(x.norm(), q.n));
}

CVector kappa_spectrum(const MomentScalars& s, int n)
{
    if (s.nodes() != n - 1)
        throw ShapeError("kappa_spectrum: expected " + std::to_string(n - 1) + " scalars");
    CVector kappa(n);
    for (int j = 1; j <= n; ++j) {
        cplx acc = 0;
        for (int k = 1; k < n; ++k) {
            if (k < j)
                acc += static_cast<double>(k) * s.c(k);
            else
                acc -= static_cast<double>(n - k) * s.c(k);
        }
        kappa(j - 1) = acc / static_cast<double>(n);
    }
    return kappa;
}

// ---------------------------------------------------------------------------

Quiver random_complex_solution(int n, const CVector& lambda_c, std::uint64_t seed)
{
    if (n < 2)
        throw ShapeError("random_complex_solution: n must be at least 2");
    if (lambda_c.size() != n - 1)
        throw ShapeError("random_complex_solution: expected " + std::to_string(n - 1) +
                         " complex scalars");
    Rng rng(seed);
    Quiver q = Quiver::zero(n);
    for (int m = 1; m < n; ++m) {
        CMatrix g = node_operator(q, m);
        g.diagonal().array() -= lambda_c(m - 1);
        CMatrix a;
        while (true) {
            a = random_complex(m + 1, m, rng);
            Eigen::JacobiSVD<CMatrix> svd(a);
            const auto& sv = svd.singularValues();
            if (sv(m - 1) >= 1e-3 * sv(0))
                break;
        }
        const CMatrix gram_inv = (a.adjoint() * a).inverse();
        const CMatrix left_inv = gram_inv * a.adjoint();
        const CMatrix proj = CMatrix::Identity(m + 1, m + 1) - a * left_inv;
        const CMatrix c = random_complex(m, m + 1, rng);
        q.alpha[m] = a;
        q.beta[m] = g * left_inv + c * proj;
    }
    return q;
}

// ---------------------------------------------------------------------------

namespace {

// Edges 1..size-1 realizing a strictly upper triangular t with positive
// superdiagonal as alpha_{size-1} beta_{size-1}, recursing on beta alpha.
void build_regular(const CMatrix& t, std::vector<CMatrix>& alpha, std::vector<CMatrix>& beta)
{
    const Eigen::Index n = t.rows();
    if (n < 2)
        return;
    const CMatrix a = upper_sqrt(t.block(0, 1, n - 1, n - 1));
    CMatrix al = CMatrix::Zero(n, n - 1);
    CMatrix be = CMatrix::Zero(n - 1, n);
    al.topRows(n - 1) = a;
    be.rightCols(n - 1) = a;
    CMatrix y = be * al;
    // exact structure: strictly upper triangular with real positive superdiagonal
    for (Eigen::Index j = 0; j < n - 1; ++j) {
        for (Eigen::Index i = j; i < n - 1; ++i)
            y(i, j) = 0;
        if (j + 1 < n - 1)
            y(j, j + 1) = cplx(y(j, j + 1).real(), 0.0);
    }
    alpha[n - 1] = al;
    beta[n - 1] = be;
    build_regular(y, alpha, beta);
}

// Columns X^{l-1} h, ..., X h, h for every chain head h, blocks by decreasing length.
CMatrix jordan_chain_basis(const CMatrix& x, const std::vector<int>& partition, double tol,
                           std::vector<int>& block_sizes)
{
    const Eigen::Index n = x.rows();
    const int top = partition.front();
    const double base = std::max(1.0, op_norm(x));
    std::vector<CMatrix> kernels(top + 1);
    kernels[0] = CMatrix(n, 0);
    CMatrix power = CMatrix::Identity(n, n);
    double scale = 1.0;
    for (int k = 1; k <= top; ++k) {
        power = power * x;
        scale *= base;
        kernels[k] = null_space(power, tol * scale);
    }
    std::vector<std::pair<int, CVector>> heads;   // (chain length, head)
    std::vector<CVector> carried;                  // images of longer chains at the current level
    for (int k = top; k >= 1; --k) {
        const Eigen::Index lower = kernels[k - 1].cols();
        CMatrix span(n, lower + static_cast<Eigen::Index>(carried.size()));
        span.leftCols(lower) = kernels[k - 1];
        for (std::size_t c = 0; c < carried.size(); ++c)
            span.col(lower + c) = carried[c];
        const CMatrix basis = range_space(span, 1e-10 * std::max(1.0, span.norm()));
        const CMatrix residual = kernels[k] - basis * (basis.adjoint() * kernels[k]);
        const int wanted = static_cast<int>(std::count(partition.begin(), partition.end(), k));
        if (wanted > 0) {
            Eigen::JacobiSVD<CMatrix> svd(residual, Eigen::ComputeThinU);
            if (svd.singularValues().size() < wanted ||
                svd.singularValues()(wanted - 1) < 1e-10)
                throw ToleranceFailure("quiver_from_nilpotent: Jordan chain extraction failed");
            for (int w = 0; w < wanted; ++w)
                heads.emplace_back(k, svd.matrixU().col(w));
        }
        std::vector<CVector> next;
        for (const auto& c : carried)
            next.push_back(x * c);
        for (const auto& h : heads)
            if (h.first == k)
                next.push_back(x * h.second);
        carried = std::move(next);
    }
    std::stable_sort(heads.begin(), heads.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    CMatrix p(n, n);
    Eigen::Index col = 0;
    block_sizes.clear();
    for (const auto& h : heads) {
        const int len = h.first;
        block_sizes.push_back(len);
        CVector v = h.second;
        for (int t = len - 1; t >= 0; --t) {
            p.col(col + t) = v;
            v = x * v;
        }
        col += len;
    }
    return p;
}

}  // namespace

Quiver quiver_from_nilpotent(const CMatrix& x, double tol)
{
    require_square(x, "quiver_from_nilpotent");
    const int n = static_cast<int>(x.rows());
    if (n < 1)
        throw ShapeError("quiver_from_nilpotent: empty matrix");
    if (!all_finite(x))
        throw ShapeError("quiver_from_nilpotent: non-finite entry");
    const JordanStructure js = jordan_type(x, tol);
    const double thr = rel_threshold(tol, op_norm(x));
    if (js.eigenvalues.size() != 1 || std::abs(js.eigenvalues.front()) > thr)
        throw NotNilpotent("quiver_from_nilpotent: input has a nonzero eigenvalue");
    Quiver q = Quiver::zero(n);
    if (n == 1)
        return q;
    const std::vector<int>& part = js.partitions.front();

    if (part.size() == 1) {
        const Triangularization tri = strict_upper_triangularize(x, tol);
        CMatrix u = tri.U;
        CVector phase = CVector::Ones(n);
        for (int k = 0; k + 1 < n; ++k) {
            const cplx s = tri.T(k, k + 1);
            phase(k + 1) = phase(k) * std::conj(s) / std::abs(s);
        }
        u = u * phase.asDiagonal();
        CMatrix t = u.adjoint() * x * u;
        for (int j = 0; j < n; ++j) {
            for (int i = j; i < n; ++i)
                t(i, j) = 0;
            if (j + 1 < n)
                t(j, j + 1) = cplx(t(j, j + 1).real(), 0.0);
        }
        build_regular(t, q.alpha, q.beta);
        q.alpha[n - 1] = u * q.alpha[n - 1];
        q.beta[n - 1] = q.beta[n - 1] * u.adjoint();
        return q;
    }

    std::vector<int> blocks;
    const CMatrix p = jordan_chain_basis(x, part, tol, blocks);
    // top-aligned staircase: a block of length l lives at nodes n-l+1..n
    for (int i = 1; i < n; ++i) {
        int row = 0;  // offset in V_{i+1}
        int col = 0;  // offset in V_i
        for (int l : blocks) {
            const int d_lo = std::max(0, l - (n - i));
            const int d_hi = std::max(0, l - (n - i - 1));
            if (d_hi > 0 && d_lo > 0) {
                q.alpha[i].block(row, col, d_lo, d_lo) = CMatrix::Identity(d_lo, d_lo);
                q.beta[i].block(col, row + 1, d_lo, d_lo) = CMatrix::Identity(d_lo, d_lo);
            }
            row += d_hi;
            col += d_lo;
        }
    }
    q.alpha[n - 1] = p * q.alpha[n - 1];
    q.beta[n - 1] = q.beta[n - 1] * p.inverse();
    return q;
}

}  // namespace quiverhk
