#include "quiverhk/matrix_engine.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace quiverhk {

long binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

std::vector<std::vector<int>> subsets(int n, int k)
{
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n)
        return out;
    std::vector<int> cur(k);
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i)
            --i;
        if (i < 0)
            break;
        ++cur[i];
        for (int t = i + 1; t < k; ++t)
            cur[t] = cur[t - 1] + 1;
    }
    return out;
}

long subset_index(const std::vector<int>& subset, int n)
{
    // rank in lexicographic order: count subsets that precede it position by position
    const int k = static_cast<int>(subset.size());
    long idx = 0;
    int prev = -1;
    for (int p = 0; p < k; ++p) {
        for (int c = prev + 1; c < subset[p]; ++c)
            idx += binomial(n - c - 1, k - p - 1);
        prev = subset[p];
    }
    return idx;
}

// ---------------------------------------------------------------------------

int numeric_rank(const CMatrix& m, double threshold)
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold)
            ++r;
    return r;
}

CMatrix null_space(const CMatrix& m, double threshold)
{
    const Eigen::Index cols = m.cols();
    if (cols == 0)
        return CMatrix(0, 0);
    if (m.rows() == 0)
        return CMatrix::Identity(cols, cols);
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold)
            ++r;
    return svd.matrixV().rightCols(cols - r);
}

CMatrix range_space(const CMatrix& m, double threshold)
{
    if (m.size() == 0)
        return CMatrix(m.rows(), 0);
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold)
            ++r;
    return svd.matrixU().leftCols(r);
}

// ---------------------------------------------------------------------------

int JordanStructure::multiplicity(std::size_t k) const
{
    return std::accumulate(partitions[k].begin(), partitions[k].end(), 0);
}

int JordanStructure::dimension() const
{
    int d = 0;
    for (std::size_t k = 0; k < partitions.size(); ++k)
        d += multiplicity(k);
    return d;
}

namespace {

std::vector<std::vector<int>> single_linkage(int m, const std::function<bool(int, int)>& linked)
{
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a)
            a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            if (find(a) != find(b) && linked(a, b))
                parent[find(a)] = find(b);
    std::vector<std::vector<int>> groups;
    std::vector<int> slot(m, -1);
    for (int a = 0; a < m; ++a) {
        const int r = find(a);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[slot[r]].push_back(a);
    }
    return groups;
}

// Nullities of (M - kappa I)^k for k = 1..s; empty when the staircase is not
// consistent with an eigenvalue of algebraic multiplicity s.
std::vector<int> staircase(const CMatrix& m, cplx kappa, int s, double tol)
{
    const Eigen::Index n = m.rows();
    CMatrix shifted = m - kappa * CMatrix::Identity(n, n);
    const double base = std::max(1.0, op_norm(shifted));
    std::vector<int> nullity;
    CMatrix power = CMatrix::Identity(n, n);
    double scale = 1.0;
    // one power past s: a cluster that is only part of a larger eigenvalue keeps
    // gaining kernel there
    for (int k = 1; k <= s + 1; ++k) {
        power = power * shifted;
        scale *= base;
        nullity.push_back(static_cast<int>(n) - numeric_rank(power, tol * scale));
    }
    if (nullity[s - 1] != s || nullity[s] != s)
        return {};
    nullity.pop_back();
    int prev_null = 0;
    int prev_step = s + 1;
    for (int k = 0; k < s; ++k) {
        const int step = nullity[k] - prev_null;
        if (step < 0 || step > prev_step)
            return {};
        prev_step = step;
        prev_null = nullity[k];
    }
    return nullity;
}

std::vector<int> partition_from_staircase(const std::vector<int>& nullity)
{
    std::vector<int> steps;
    int prev = 0;
    for (int v : nullity) {
        steps.push_back(v - prev);
        prev = v;
    }
    std::vector<int> blocks;
    for (int b = 1; b <= steps.front(); ++b) {
        int size = 0;
        for (int d : steps)
            if (d >= b)
                ++size;
        blocks.push_back(size);
    }
    return blocks;
}

}  // namespace

JordanStructure jordan_type(const CMatrix& m, double tol)
{
    require_square(m, "jordan_type");
    if (!(tol > 0))
        throw InputError("jordan_type: tol must be positive");
    JordanStructure out;
    const Eigen::Index n = m.rows();
    if (n == 0)
        return out;

    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    const double scale = std::max(1.0, op_norm(m));
    const double near = tol * scale;
    const double far = 1e-2 * scale;

    auto smallest_sv = [&](cplx z) {
        Eigen::JacobiSVD<CMatrix> svd(m - z * CMatrix::Identity(n, n));
        return svd.singularValues()(n - 1);
    };
    // Two computed eigenvalues belong together when they are within tol, or when
    // the segment between them stays inside the tol-pseudospectrum (how a
    // defective eigenvalue scatters under rounding).
    double radius = 0;
    auto linked = [&](int a, int b) {
        const double d = std::abs(ev[a] - ev[b]);
        if (d > far)
            return false;
        if (d > near)
            for (double t : {0.25, 0.5, 0.75})
                if (smallest_sv(ev[a] + t * (ev[b] - ev[a])) > near)
                    return false;
        radius = std::max(radius, d);
        return true;
    };
    const auto groups = single_linkage(static_cast<int>(n), linked);

    std::vector<std::pair<cplx, std::vector<int>>> found;
    for (const auto& g : groups) {
        cplx kappa = 0;
        for (int i : g)
            kappa += ev[i];
        kappa /= static_cast<double>(g.size());
        const auto nullity = staircase(m, kappa, static_cast<int>(g.size()), tol);
        if (nullity.empty())
            throw ToleranceFailure("jordan_type: rank staircase inconsistent for the cluster near (" +
                                   std::to_string(kappa.real()) + ", " + std::to_string(kappa.imag()) + ")");
        found.emplace_back(kappa, partition_from_staircase(nullity));
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real())
            return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });
    for (auto& f : found) {
        out.eigenvalues.push_back(f.first);
        out.partitions.push_back(std::move(f.second));
    }
    out.cluster_radius = radius;
    return out;
}

double clustered_spectral_radius(const CMatrix& m, double tol)
{
    const auto js = jordan_type(m, tol);
    double r = 0;
    for (const auto& e : js.eigenvalues)
        r = std::max(r, std::abs(e));
    return r;
}

// ---------------------------------------------------------------------------

namespace {

void normalize_phase(CVector& u)
{
    Eigen::Index k = 0;
    u.cwiseAbs().maxCoeff(&k);
    if (std::abs(u(k)) > 0)
        u *= std::conj(u(k)) / std::abs(u(k));
}

}  // namespace

Triangularization strict_upper_triangularize(const CMatrix& x, double tol)
{
    require_square(x, "strict_upper_triangularize");
    const Eigen::Index n = x.rows();
    const double thr = rel_threshold(tol, op_norm(x));
    CMatrix U(n, n);
    CMatrix Q = CMatrix::Identity(n, n);  // orthonormal basis of the complement built so far
    for (Eigen::Index step = 0; step < n; ++step) {
        const Eigen::Index m = n - step;
        CMatrix C = Q.adjoint() * x * Q;
        Eigen::JacobiSVD<CMatrix> svd(C, Eigen::ComputeFullV);
        const double smin = svd.singularValues()(m - 1);
        if (smin > thr)
            throw NotNilpotent("strict_upper_triangularize: compression has smallest singular value " +
                               std::to_string(smin) + " above " + std::to_string(thr));
        CVector y = svd.matrixV().col(m - 1);
        CVector u = Q * y;
        normalize_phase(u);
        U.col(step) = u;
        if (m > 1) {
            CVector yy = Q.adjoint() * u;
            CMatrix yc = yy;
            Eigen::HouseholderQR<CMatrix> qr(yc);
            CMatrix H = qr.householderQ() * CMatrix::Identity(m, m);
            Q = Q * H.rightCols(m - 1);
        }
    }
    Triangularization out;
    out.U = U;
    out.T = U.adjoint() * x * U;
    out.lower_residual = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j; i < n; ++i) {
            out.lower_residual = std::max(out.lower_residual, std::abs(out.T(i, j)));
            out.T(i, j) = 0;
        }
    return out;
}

CMatrix upper_sqrt(const CMatrix& m)
{
    require_square(m, "upper_sqrt");
    const Eigen::Index n = m.rows();
    const double scale = 1.0 + m.norm();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i)
            if (std::abs(m(i, j)) > 1e-12 * scale)
                throw ShapeError("upper_sqrt: input is not upper triangular");
    CMatrix a = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx d = m(i, i);
        if (!(d.real() > 0) || std::abs(d.imag()) > 1e-10 * std::abs(d))
            throw InputError("upper_sqrt: diagonal entry " + std::to_string(i) +
                             " is not real positive");
        a(i, i) = std::sqrt(d.real());
    }
    for (Eigen::Index d = 1; d < n; ++d)
        for (Eigen::Index i = 0; i + d < n; ++i) {
            const Eigen::Index j = i + d;
            cplx acc = m(i, j);
            for (Eigen::Index k = i + 1; k < j; ++k)
                acc -= a(i, k) * a(k, j);
            a(i, j) = acc / (a(i, i) + a(j, j));
        }
    return a;
}

CMatrix hermitian_exp(const CMatrix& h, double t)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const Eigen::VectorXd w = (t * es.eigenvalues().array()).exp();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------

CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    CMatrix m(rows, cols);
    const double s = 1.0 / std::sqrt(2.0);
    // fill row by row so the draw order is layout independent
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = nd(rng);
            const double im = nd(rng);
            m(i, j) = cplx(s * re, s * im);
        }
    return m;
}

cplx random_complex_scalar(Rng& rng)
{
    return random_complex(1, 1, rng)(0, 0);
}

double random_uniform(Rng& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> ud(lo, hi);
    return ud(rng);
}

CMatrix haar_unitary(int n, Rng& rng)
{
    CMatrix g = random_complex(n, n, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        const cplx d = r(i, i);
        if (std::abs(d) > 0)
            q.col(i) *= d / std::abs(d);
    }
    return q;
}

CMatrix haar_special_unitary(int n, Rng& rng)
{
    CMatrix q = haar_unitary(n, rng);
    const cplx det = q.determinant();
    const cplx root = std::pow(det, -1.0 / n);
    return q * root;
}

std::pair<cplx, cplx> random_su2(Rng& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    double a = nd(rng), b = nd(rng), c = nd(rng), d = nd(rng);
    const double r = std::sqrt(a * a + b * b + c * c + d * d);
    return {cplx(a / r, b / r), cplx(c / r, d / r)};
}

}  // namespace quiverhk
