#include "quiverhk/nilcone.hpp"

#include <cmath>
#include <functional>

namespace quiverhk {

namespace {

const cplx I(0.0, 1.0);

void check_nilpotent(const CMatrix& x, double tol)
{
    const JordanStructure js = jordan_type(x, tol);
    if (js.eigenvalues.size() != 1 || std::abs(js.eigenvalues.front()) > rel_threshold(tol, op_norm(x)))
        throw NotNilpotent("phi_n: input is not nilpotent");
}

// Unitary frame in which x is strictly upper triangular with real positive
// superdiagonal.  regular is false when some superdiagonal entry vanishes.
struct RegularFrame {
    bool regular = false;
    CMatrix U;
    CMatrix T;
};

RegularFrame regular_frame(const CMatrix& x, double tol)
{
    const Eigen::Index n = x.rows();
    RegularFrame f;
    const Triangularization tri = strict_upper_triangularize(x, tol);
    const double thr = rel_threshold(tol, op_norm(x));
    CVector phase = CVector::Ones(n);
    f.regular = true;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const cplx s = tri.T(k, k + 1);
        if (std::abs(s) <= thr) {
            f.regular = false;
            phase(k + 1) = phase(k);
        } else {
            phase(k + 1) = phase(k) * std::conj(s) / std::abs(s);
        }
    }
    f.U = tri.U * phase.asDiagonal();
    f.T = f.U.adjoint() * x * f.U;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j; i < n; ++i)
            f.T(i, j) = 0;
        if (j + 1 < n)
            f.T(j, j + 1) = cplx(f.T(j, j + 1).real(), 0.0);
    }
    return f;
}

// Phi of [[0, A^2], [0, 0]] given the solved B.
CMatrix phi_from_AB(const CMatrix& a, const CMatrix& b)
{
    const Eigen::Index m = a.rows();
    const CMatrix ab = a * b;
    const CMatrix bia = b.triangularView<Eigen::Upper>().solve(a);
    CMatrix out = CMatrix::Zero(m + 1, m + 1);
    out.topLeftCorner(m, m) += ab * ab.adjoint();
    out.bottomRightCorner(m, m) -= bia.adjoint() * bia;
    return I * out;
}

CMatrix phi_triangular(const CMatrix& t, BConvention conv, const BalanceParams& fallback, int& iters);

CMatrix phi_balanced(const CMatrix& x, const BalanceParams& params, double tol, PhiResult* diag)
{
    const Quiver q = quiver_from_nilpotent(x, tol);
    BalanceParams p = params;
    p.group = GaugeGroup::Unitary;
    const BalanceReport rep = balance(q, MomentScalars::zero(q.n), p);
    if (diag) {
        diag->solver_residual = rep.residual;
        diag->iterations = rep.iterations;
    }
    return phi_from_quiver(rep.quiver);
}

// Hermitian m x m matrix <-> m^2 real coordinates.
Eigen::VectorXd pack_hermitian(const CMatrix& h)
{
    const Eigen::Index m = h.rows();
    Eigen::VectorXd v(m * m);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        v(k++) = h(i, i).real();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            v(k++) = h(i, j).real();
            v(k++) = h(i, j).imag();
        }
    return v;
}

CMatrix unpack_B(const Eigen::VectorXd& theta, Eigen::Index m)
{
    CMatrix b = CMatrix::Zero(m, m);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        b(i, i) = std::exp(theta(k++));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double re = theta(k++);
            const double im = theta(k++);
            b(i, j) = cplx(re, im);
        }
    return b;
}

void check_triangular_positive(const CMatrix& a, const char* who)
{
    require_square(a, who);
    const double scale = 1.0 + a.norm();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < a.rows(); ++i)
            if (std::abs(a(i, j)) > 1e-12 * scale)
                throw ShapeError(std::string(who) + ": A is not upper triangular");
        const cplx d = a(j, j);
        if (!(d.real() > 0) || std::abs(d.imag()) > 1e-10 * std::abs(d))
            throw InputError(std::string(who) + ": A needs a real positive diagonal");
    }
}

// Y_B = (0 | B^-1 A)(AB ; 0), strictly upper triangular with positive superdiagonal.
CMatrix lower_level(const CMatrix& a, const CMatrix& b)
{
    const Eigen::Index m = a.rows();
    const CMatrix c1 = b.triangularView<Eigen::Upper>().solve(a);
    const CMatrix c2 = a * b;
    CMatrix beta = CMatrix::Zero(m, m + 1);
    CMatrix alpha = CMatrix::Zero(m + 1, m);
    beta.rightCols(m) = c1;
    alpha.topRows(m) = c2;
    CMatrix y = beta * alpha;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = j; i < m; ++i)
            y(i, j) = 0;
        if (j + 1 < m)
            y(j, j + 1) = cplx(y(j, j + 1).real(), 0.0);
    }
    return y;
}

CMatrix phi_triangular(const CMatrix& t, BConvention conv, const BalanceParams& fallback, int& iters)
{
    const Eigen::Index n = t.rows();
    if (n <= 1)
        return CMatrix::Zero(n, n);
    const CMatrix a = upper_sqrt(t.block(0, 1, n - 1, n - 1));
    const BSolve bs = recursive_B_solve(a, conv, fallback);
    iters += bs.iterations;
    return phi_from_AB(a, bs.B);
}

}  // namespace

// ---------------------------------------------------------------------------

PhiMethod parse_phi_method(const std::string& name)
{
    if (name == "closed2")
        return PhiMethod::Closed2;
    if (name == "closed3")
        return PhiMethod::Closed3;
    if (name == "recursive")
        return PhiMethod::Recursive;
    if (name == "balancer")
        return PhiMethod::Balancer;
    throw InputError("unknown Phi method '" + name + "' (closed2, closed3, recursive, balancer)");
}

std::string to_string(PhiMethod m)
{
    switch (m) {
    case PhiMethod::Closed2: return "closed2";
    case PhiMethod::Closed3: return "closed3";
    case PhiMethod::Recursive: return "recursive";
    case PhiMethod::Balancer: return "balancer";
    }
    return "unknown";
}

CMatrix phi2_closed(const CMatrix& x)
{
    if (x.rows() != 2 || x.cols() != 2)
        throw ShapeError("phi2_closed: needs a 2x2 matrix");
    const double nrm = x.norm();
    if (nrm == 0)
        return CMatrix::Zero(2, 2);
    return I * (x * x.adjoint() - x.adjoint() * x) / nrm;
}

Phi3Closed phi3_closed(double a, cplx b, double c)
{
    if (!(a > 0) || !(c > 0))
        throw InputError("phi3_closed: a and c must be positive");
    const double mb = std::abs(b);
    if (!(mb > 0))
        throw InputError("phi3_closed: b = 0 is degenerate, use the balancer");
    Phi3Closed out;
    const double a4c4 = std::pow(a, 4) + std::pow(c, 4);
    out.gamma = c * std::sqrt((a + c) * mb / a4c4);
    out.delta = a / c;
    out.alpha = a * out.gamma / c;
    out.beta = b * (c * c * c - a * a * a) / (out.gamma * a4c4);
    const cplx ph = b / mb;
    CMatrix m = CMatrix::Zero(3, 3);
    m(0, 0) = mb * (a + c);
    m(0, 1) = ph * c * c;
    m(1, 0) = std::conj(ph) * c * c;
    m(1, 2) = -ph * a * a;
    m(2, 1) = -std::conj(ph) * a * a;
    m(2, 2) = -mb * (a + c);
    out.phi = I * m;
    return out;
}

CMatrix block_nilpotent(const CMatrix& a)
{
    require_square(a, "block_nilpotent");
    const Eigen::Index m = a.rows();
    CMatrix x = CMatrix::Zero(m + 1, m + 1);
    x.block(0, 1, m, m) = a * a;
    return x;
}

BSolve recursive_B_solve(const CMatrix& a, BConvention convention, const BalanceParams& fallback)
{
    check_triangular_positive(a, "recursive_B_solve");
    const Eigen::Index m = a.rows();
    BSolve out;
    out.B = CMatrix::Identity(m, m);
    if (m <= 1)
        return out;

    const double sign = convention == BConvention::Printed ? -1.0 : 1.0;
    int inner_iters = 0;
    auto lower_phi = [&](const CMatrix& y) -> CMatrix {
        try {
            return phi_triangular(y, convention, fallback, inner_iters);
        } catch (const NewtonStagnation&) {
            if (convention != BConvention::MomentConsistent)
                throw;
            return phi_balanced(y, fallback, 1e-8, nullptr);
        }
    };
    auto residual_at = [&](const CMatrix& ak, const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        const CMatrix b = unpack_B(theta, m);
        const CMatrix y = lower_level(ak, b);
        const CMatrix c1 = b.triangularView<Eigen::Upper>().solve(ak);
        const CMatrix c2 = ak * b;
        const CMatrix rhs = c1 * c1.adjoint() - c2.adjoint() * c2;
        const CMatrix lhs = -I * lower_phi(y);
        CMatrix f = lhs + sign * rhs;
        f = 0.5 * (f + f.adjoint());
        return pack_hermitian(f);
    };

    const Eigen::Index dim = m * m;
    const double target = 1e-13 * (1.0 + a.squaredNorm());
    int it = 0;

    // Damped Newton for the equation at ak, starting from theta; returns the residual.
    auto newton = [&](const CMatrix& ak, Eigen::VectorXd& theta) {
        Eigen::VectorXd f = residual_at(ak, theta);
        for (int local = 0; local < 100 && f.norm() > target; ++local, ++it) {
            Eigen::MatrixXd jac(dim, dim);
            for (Eigen::Index k = 0; k < dim; ++k) {
                const double h = 1e-6 * (1.0 + std::abs(theta(k)));
                Eigen::VectorXd tp = theta, tm = theta;
                tp(k) += h;
                tm(k) -= h;
                jac.col(k) = (residual_at(ak, tp) - residual_at(ak, tm)) / (2 * h);
            }
            const Eigen::VectorXd delta = jac.colPivHouseholderQr().solve(-f);
            double t = 1.0;
            bool moved = false;
            for (int halving = 0; halving <= 30; ++halving) {
                const Eigen::VectorXd trial = theta + t * delta;
                Eigen::VectorXd ft;
                try {
                    ft = residual_at(ak, trial);
                } catch (const Error&) {
                    // an overshooting step can leave the domain of the inner level
                    t *= 0.5;
                    continue;
                }
                if (ft.allFinite() && ft.norm() < f.norm()) {
                    theta = trial;
                    f = ft;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved || (t * delta).norm() < 1e-14)
                break;
        }
        return f.norm();
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
    double res = newton(a, theta);
    if (res > 1e-8) {
        // Continuation from a matrix whose diagonal is flattened to its
        // geometric mean back to a, warm-starting each step.
        Eigen::VectorXd logd(m);
        for (Eigen::Index i = 0; i < m; ++i)
            logd(i) = std::log(a(i, i).real());
        const double mean = logd.mean();
        auto a_at = [&](double s) {
            CMatrix ak = a;
            for (Eigen::Index i = 0; i < m; ++i)
                ak(i, i) = std::exp(mean + s * (logd(i) - mean));
            return ak;
        };
        theta.setZero();
        const double loose = 1e-9 * (1.0 + a.squaredNorm());
        double s = 0.0, ds = 0.25;
        bool started = newton(a_at(0.0), theta) <= loose;
        while (started && s < 1.0 && ds > 1e-4) {
            const double next = std::min(1.0, s + ds);
            Eigen::VectorXd trial = theta;
            if (newton(a_at(next), trial) <= loose) {
                theta = trial;
                s = next;
                ds = std::min(0.5, 2.0 * ds);
            } else {
                ds *= 0.5;
            }
        }
        res = newton(a, theta);
    }
    auto residual_of = [&](const Eigen::VectorXd& th) { return residual_at(a, th); };
    const Eigen::VectorXd f = residual_of(theta);
    out.B = unpack_B(theta, m);
    out.residual = std::min(res, f.norm());
    out.iterations = it + inner_iters;
    if (out.residual > 1e-8)
        throw NewtonStagnation("recursive_B_solve: Newton stalled with residual " +
                               std::to_string(out.residual));
    return out;
}

// ---------------------------------------------------------------------------

PhiResult phi_n_detailed(const CMatrix& x, PhiMethod method, const PhiOptions& opts)
{
    require_square(x, "phi_n");
    if (!all_finite(x))
        throw ShapeError("phi_n: non-finite entry");
    const Eigen::Index n = x.rows();
    if (n == 0)
        throw ShapeError("phi_n: empty matrix");
    if (method == PhiMethod::Closed2 && n != 2)
        throw ShapeError("phi_n: closed2 needs n = 2, got n = " + std::to_string(n));
    if (method == PhiMethod::Closed3 && n != 3)
        throw ShapeError("phi_n: closed3 needs n = 3, got n = " + std::to_string(n));
    check_nilpotent(x, opts.tol);

    PhiResult res;
    res.method = method;
    if (method == PhiMethod::Closed2) {
        res.phi = phi2_closed(x);
    } else if (method == PhiMethod::Closed3 || method == PhiMethod::Recursive) {
        const RegularFrame f = regular_frame(x, opts.tol);
        bool generic = f.regular;
        CMatrix a;
        if (generic && n > 1) {
            a = upper_sqrt(f.T.block(0, 1, n - 1, n - 1));
            if (method == PhiMethod::Closed3 && std::abs(a(0, 1)) <= rel_threshold(opts.tol, a.norm()))
                generic = false;
        }
        if (!generic) {
            res.method = PhiMethod::Balancer;
            res.phi = phi_balanced(x, opts.balance, opts.tol, &res);
        } else if (n == 1) {
            res.phi = CMatrix::Zero(1, 1);
        } else if (method == PhiMethod::Closed3) {
            const Phi3Closed c = phi3_closed(a(0, 0).real(), a(0, 1), a(1, 1).real());
            res.phi = f.U * c.phi * f.U.adjoint();
        } else {
            const BSolve bs = recursive_B_solve(a, opts.convention, opts.balance);
            res.solver_residual = bs.residual;
            res.iterations = bs.iterations;
            res.phi = f.U * phi_from_AB(a, bs.B) * f.U.adjoint();
        }
    } else {
        res.phi = phi_balanced(x, opts.balance, opts.tol, &res);
    }
    res.skew_residual = (res.phi + res.phi.adjoint()).norm();
    res.trace_residual = std::abs(res.phi.trace());
    return res;
}

CMatrix phi_n(const CMatrix& x, PhiMethod method, const PhiOptions& opts)
{
    return phi_n_detailed(x, method, opts).phi;
}

CMatrix su2_rotate_nilpotent(const CMatrix& eta, cplx u, cplx v, PhiMethod method, const PhiOptions& opts)
{
    const double unit = std::norm(u) + std::norm(v);
    if (std::abs(unit - 1.0) > 1e-12)
        throw InputError("su2_rotate_nilpotent: (u, v) is not a unit vector");
    const CMatrix phi = phi_n(eta, method, opts);
    const CMatrix out = u * u * eta + I * u * v * phi - v * v * eta.adjoint();
    const double radius = clustered_spectral_radius(out, 1e-6);
    if (radius > 1e-6 * (1.0 + eta.norm()))
        throw ToleranceFailure("su2_rotate_nilpotent: rotated matrix has eigenvalue of modulus " +
                               std::to_string(radius));
    return out;
}

CMatrix TwistorQuadratic::evaluate(cplx u, cplx v) const
{
    return u * u * coeff[0] + u * v * coeff[1] + v * v * coeff[2];
}

TwistorQuadratic twistor_section_of(const CMatrix& eta, PhiMethod method, const PhiOptions& opts)
{
    TwistorQuadratic t;
    t.coeff[0] = eta;
    t.coeff[1] = I * phi_n(eta, method, opts);
    t.coeff[2] = -eta.adjoint();
    return t;
}

std::pair<CMatrix, cplx> nilcone_real_structure(const CMatrix& x, cplx zeta)
{
    if (zeta == cplx(0, 0))
        throw InputError("nilcone_real_structure: zeta must be nonzero");
    const cplx zb = std::conj(zeta);
    return {CMatrix(-x.adjoint() / (zb * zb)), -1.0 / zb};
}

}  // namespace quiverhk
