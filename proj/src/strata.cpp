#include "quiverhk/strata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace quiverhk {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a)
    {
        while (parent[a] != a)
            a = parent[a] = parent[parent[a]];
        return a;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

SetPartition blocks_of(UnionFind& uf, int n)
{
    SetPartition out;
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = uf.find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[r]].push_back(i + 1);
    }
    return out;  // already ordered by minimal element
}

double lambda_scale(const std::vector<Lambda3>& lambda)
{
    double m = 0;
    for (const auto& l : lambda)
        m = std::max(m, std::sqrt(l[0] * l[0] + l[1] * l[1] + l[2] * l[2]));
    return 1.0 + m;
}

std::vector<Lambda3> prefix_sums(const std::vector<Lambda3>& lambda)
{
    std::vector<Lambda3> p(lambda.size() + 1, Lambda3{0, 0, 0});
    for (std::size_t i = 0; i < lambda.size(); ++i)
        for (int c = 0; c < 3; ++c)
            p[i + 1][c] = p[i][c] + lambda[i][c];
    return p;
}

double dist3(const Lambda3& a, const Lambda3& b)
{
    const double x = a[0] - b[0], y = a[1] - b[1], z = a[2] - b[2];
    return std::sqrt(x * x + y * y + z * z);
}

bool is_invertible(const CMatrix& m, double tol)
{
    if (m.rows() != m.cols())
        return false;
    if (m.size() == 0)
        return true;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > rel_threshold(tol, sv(0)) && sv(0) / smin < 1e6;
}

}  // namespace

std::vector<Lambda3> lambda_triples(const MomentScalars& s)
{
    std::vector<Lambda3> out;
    for (int m = 1; m <= s.nodes(); ++m)
        out.push_back({s.c(m).real(), s.c(m).imag(), s.r(m)});
    return out;
}

SetPartition partition_from_lambda(const std::vector<Lambda3>& lambda, double tol)
{
    if (!(tol > 0))
        throw InputError("partition_from_lambda: tol must be positive");
    const int n = static_cast<int>(lambda.size()) + 1;
    const auto p = prefix_sums(lambda);
    const double thr = tol * lambda_scale(lambda);
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist3(p[i], p[j]) <= thr)
                uf.join(i, j);
    return blocks_of(uf, n);
}

bool in_Q_circle(const Quiver& q, double tol)
{
    const auto lambda = lambda_triples(infer_scalars(q).scalars);
    const auto p = prefix_sums(lambda);
    const double thr = tol * lambda_scale(lambda);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const bool real3 = dist3(p[i], p[j]) <= thr;
            const bool complex = std::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]) <= thr;
            if (real3 != complex)
                return false;
        }
    return true;
}

std::vector<std::pair<cplx, cplx>> rotation_sample()
{
    std::vector<std::array<double, 3>> dirs;
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
            dirs.push_back({0.0, s1, s2 * phi});
            dirs.push_back({s1, s2 * phi, 0.0});
            dirs.push_back({s2 * phi, 0.0, s1});
        }
    dirs.push_back({1, 1, 1});
    dirs.push_back({1, -1, -1});
    dirs.push_back({-1, 1, -1});
    dirs.push_back({-1, -1, 1});
    std::vector<std::pair<cplx, cplx>> out{{cplx(1, 0), cplx(0, 0)}};
    for (const auto& d : dirs) {
        const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        const double theta = std::acos(d[2] / r);
        const double az = std::atan2(d[1], d[0]);
        out.emplace_back(cplx(std::cos(theta / 2), 0.0), std::polar(std::sin(theta / 2), az));
    }
    return out;
}

StratumLabel label_in_Q_circle(const Quiver& q, double tol)
{
    const MomentScalars s = infer_scalars(q).scalars;
    StratumLabel label;
    label.partition = partition_from_lambda(lambda_triples(s), tol);
    const CMatrix x0 = trace_free(top_product(q));
    const CVector kappa = kappa_spectrum(s, q.n);
    const JordanStructure js = jordan_type(x0, tol);
    const double scale = 1.0 + op_norm(x0) + kappa.cwiseAbs().maxCoeff();
    std::vector<int> used(js.eigenvalues.size(), 0);
    for (const auto& block : label.partition) {
        cplx kb = 0;
        for (int i : block)
            kb += kappa(i - 1);
        kb /= static_cast<double>(block.size());
        std::size_t best = 0;
        double bestd = INFINITY;
        for (std::size_t c = 0; c < js.eigenvalues.size(); ++c) {
            const double d = std::abs(js.eigenvalues[c] - kb);
            if (d < bestd) {
                bestd = d;
                best = c;
            }
        }
        if (bestd > 1e-6 * scale || js.multiplicity(best) != static_cast<int>(block.size()) || used[best])
            throw ToleranceFailure("classify: eigenvalues of X0 do not match the kappa values of the "
                                   "equivalence classes");
        used[best] = 1;
        label.orbits.push_back(js.partitions[best]);
    }
    return label;
}

Classification classify(const Quiver& q, double tol)
{
    q.validate();
    for (const auto& [u, v] : rotation_sample()) {
        const Quiver r = su2_act(q, u, v);
        if (!in_Q_circle(r, tol))
            continue;
        Classification c;
        c.label = label_in_Q_circle(r, tol);
        c.u = u;
        c.v = v;
        return c;
    }
    throw Unattainable("classify: no rotation in the sample lands in Q°");
}

// ---------------------------------------------------------------------------

void QuiverSegment::validate() const
{
    const int L = length();
    if (L < 0)
        throw ShapeError("segment: needs at least one node");
    if (static_cast<int>(alpha.size()) != L || static_cast<int>(beta.size()) != L)
        throw ShapeError("segment: expected one alpha and one beta per edge");
    for (int e = 0; e < L; ++e) {
        if (alpha[e].rows() != dims[e + 1] || alpha[e].cols() != dims[e])
            throw ShapeError("segment: alpha[" + std::to_string(e) + "] has the wrong shape");
        if (beta[e].rows() != dims[e] || beta[e].cols() != dims[e + 1])
            throw ShapeError("segment: beta[" + std::to_string(e) + "] has the wrong shape");
    }
}

QuiverSegment segment_of(const Quiver& q)
{
    QuiverSegment s;
    for (int m = 1; m <= q.n; ++m)
        s.dims.push_back(m);
    for (int m = 1; m < q.n; ++m) {
        s.alpha.push_back(q.alpha[m]);
        s.beta.push_back(q.beta[m]);
    }
    return s;
}

CMatrix segment_node_operator(const QuiverSegment& s, int e)
{
    if (e == 0)
        return CMatrix::Zero(s.dims[0], s.dims[0]);
    const CMatrix& a = s.alpha[e - 1];
    const CMatrix& b = s.beta[e - 1];
    if (a.cols() == 0)
        return CMatrix::Zero(a.rows(), a.rows());
    return a * b;
}

CMatrix segment_top_product(const QuiverSegment& s)
{
    return segment_node_operator(s, s.length());
}

std::pair<CVector, double> segment_scalars(const QuiverSegment& s)
{
    s.validate();
    const int L = s.length();
    CVector lambda = CVector::Zero(L);
    double resid = 0;
    for (int e = 0; e < L; ++e) {
        CMatrix ba = s.beta[e] * s.alpha[e];
        if (s.dims[e] == 0)
            continue;
        const CMatrix d = segment_node_operator(s, e) - ba;
        lambda(e) = d.trace() / static_cast<double>(s.dims[e]);
        resid = std::max(resid, trace_free(d).norm());
    }
    return {lambda, resid};
}

double segment_complex_residual(const QuiverSegment& s, const CVector& lambda)
{
    s.validate();
    double r = 0;
    for (int e = 0; e < s.length(); ++e) {
        if (s.dims[e] == 0)
            continue;
        CMatrix d = segment_node_operator(s, e) - s.beta[e] * s.alpha[e];
        d.diagonal().array() -= lambda(e);
        r = std::max(r, d.norm());
    }
    return r;
}

std::vector<EigenFamily> decompose_by_eigenspaces(const Quiver& q, double tol)
{
    q.validate();
    const ScalarInference inf = infer_scalars(q);
    if (complex_residual(q, inf.scalars) > 1e-8)
        throw PreconditionViolated("decompose_by_eigenspaces: complex equations not satisfied");
    const int n = q.n;
    const CVector nu = partial_sums_from(inf.scalars);

    struct Piece {
        int node;
        cplx label;
        CMatrix basis;
    };
    std::vector<Piece> pieces;
    for (int m = 1; m <= n; ++m) {
        const CMatrix op = node_operator(q, m);
        const JordanStructure js = jordan_type(op, tol);
        for (std::size_t c = 0; c < js.eigenvalues.size(); ++c) {
            const int s = js.multiplicity(c);
            const CMatrix shifted = op - js.eigenvalues[c] * CMatrix::Identity(m, m);
            const double base = std::max(1.0, op_norm(shifted));
            CMatrix power = CMatrix::Identity(m, m);
            for (int k = 0; k < s; ++k)
                power = power * shifted;
            const CMatrix basis = null_space(power, tol * std::pow(base, s));
            if (basis.cols() != s)
                throw LeakageError("decompose_by_eigenspaces: generalized eigenspace has the wrong dimension");
            pieces.push_back({m, js.eigenvalues[c] - nu(m - 1), basis});
        }
    }

    double scale = 1.0;
    for (const auto& p : pieces)
        scale = std::max(scale, 1.0 + std::abs(p.label));
    const double radius = 1e3 * tol * scale;
    UnionFind uf(static_cast<int>(pieces.size()));
    for (std::size_t a = 0; a < pieces.size(); ++a)
        for (std::size_t b = a + 1; b < pieces.size(); ++b)
            if (std::abs(pieces[a].label - pieces[b].label) <= radius)
                uf.join(static_cast<int>(a), static_cast<int>(b));

    std::vector<EigenFamily> families;
    std::vector<int> slot(pieces.size(), -1);
    std::vector<int> count;
    for (std::size_t a = 0; a < pieces.size(); ++a) {
        const int r = uf.find(static_cast<int>(a));
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(families.size());
            EigenFamily f;
            f.label = 0;
            for (int m = 1; m <= n; ++m)
                f.basis.push_back(CMatrix(m, 0));
            families.push_back(std::move(f));
            count.push_back(0);
        }
        EigenFamily& f = families[slot[r]];
        const Piece& p = pieces[a];
        if (f.basis[p.node - 1].cols() != 0)
            throw LeakageError("decompose_by_eigenspaces: two eigenvalue clusters at node " +
                               std::to_string(p.node) + " share a family");
        f.basis[p.node - 1] = p.basis;
        f.label += p.label;
        ++count[slot[r]];
    }

    const double leak_tol = tol * (1.0 + q.norm());
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        EigenFamily& f = families[fi];
        f.label /= static_cast<double>(count[fi]);
        for (int m = 1; m <= n; ++m)
            f.segment.dims.push_back(static_cast<int>(f.basis[m - 1].cols()));
        for (int m = 1; m < n; ++m) {
            const CMatrix& lo = f.basis[m - 1];
            const CMatrix& hi = f.basis[m];
            const CMatrix a_img = q.alpha[m] * lo;
            const CMatrix b_img = q.beta[m] * hi;
            const CMatrix a_res = hi.adjoint() * a_img;
            const CMatrix b_res = lo.adjoint() * b_img;
            f.leakage = std::max(f.leakage, (a_img - hi * a_res).norm());
            f.leakage = std::max(f.leakage, (b_img - lo * b_res).norm());
            f.segment.alpha.push_back(a_res);
            f.segment.beta.push_back(b_res);
        }
        if (f.leakage > leak_tol)
            throw LeakageError("decompose_by_eigenspaces: off-block leakage " + std::to_string(f.leakage));
    }
    std::sort(families.begin(), families.end(), [](const EigenFamily& a, const EigenFamily& b) {
        if (a.label.real() != b.label.real())
            return a.label.real() < b.label.real();
        return a.label.imag() < b.label.imag();
    });
    return families;
}

QuiverSegment contract_edge(const QuiverSegment& s, int e)
{
    s.validate();
    const int L = s.length();
    if (e < 0 || e >= L)
        throw ShapeError("contract_edge: edge " + std::to_string(e) + " outside 0.." + std::to_string(L - 1));
    const CMatrix& a = s.alpha[e];
    if (a.rows() != a.cols())
        throw InputError("contract_edge: alpha[" + std::to_string(e) + "] is not square");
    if (a.size() > 0) {
        Eigen::JacobiSVD<CMatrix> svd(a);
        const auto& sv = svd.singularValues();
        if (!(sv(sv.size() - 1) > 0) || sv(0) / sv(sv.size() - 1) >= 1e6)
            throw InputError("contract_edge: alpha[" + std::to_string(e) + "] is not invertible");
    }
    const CMatrix ainv = a.size() > 0 ? CMatrix(a.inverse()) : CMatrix(0, 0);

    QuiverSegment out;
    if (e + 1 < L) {
        for (int k = 0; k <= L; ++k)
            if (k != e + 1)
                out.dims.push_back(s.dims[k]);
        for (int k = 0; k < L; ++k) {
            if (k == e) {
                out.alpha.push_back(s.alpha[e + 1] * a);
                out.beta.push_back(ainv * s.beta[e + 1]);
            } else if (k != e + 1) {
                out.alpha.push_back(s.alpha[k]);
                out.beta.push_back(s.beta[k]);
            }
        }
    } else {
        // fold node e into the top node
        for (int k = 0; k <= L; ++k)
            if (k != e)
                out.dims.push_back(s.dims[k]);
        for (int k = 0; k < e; ++k) {
            if (k == e - 1) {
                out.alpha.push_back(a * s.alpha[k]);
                out.beta.push_back(s.beta[k] * ainv);
            } else {
                out.alpha.push_back(s.alpha[k]);
                out.beta.push_back(s.beta[k]);
            }
        }
    }
    return out;
}

QuiverSegment contract_isomorphisms(const QuiverSegment& s, double tol)
{
    QuiverSegment cur = s;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int e = cur.length() - 1; e >= 0; --e) {
            if (cur.dims[e] != cur.dims[e + 1])
                continue;
            if (is_invertible(cur.alpha[e], tol) && is_invertible(cur.beta[e], tol)) {
                cur = contract_edge(cur, e);
                changed = true;
                break;
            }
        }
    }
    return cur;
}

}  // namespace quiverhk
