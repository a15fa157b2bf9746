#include "quiverhk/balancer.hpp"

#include <cmath>

namespace quiverhk {

namespace {

void check_target(const Quiver& q, const MomentScalars& target)
{
    if (target.nodes() != q.n - 1 || static_cast<int>(target.lambda_r.size()) != q.n - 1)
        throw ShapeError("balance: target scalars do not match the quiver");
}

CMatrix gram(const CMatrix& a) { return a.cols() == 0 ? CMatrix::Zero(a.rows(), a.rows()) : CMatrix(a * a.adjoint()); }
CMatrix cogram(const CMatrix& a) { return a.rows() == 0 ? CMatrix::Zero(a.cols(), a.cols()) : CMatrix(a.adjoint() * a); }

// Derivative of the real moment map at node m along the infinitesimal gauge h.
std::vector<CMatrix> moment_derivative(const Quiver& q, const std::vector<CMatrix>& h)
{
    const int n = q.n;
    auto H = [&](int i) -> CMatrix {
        if (i >= 1 && i <= n - 1)
            return h[i - 1];
        return CMatrix::Zero(i, i);  // V_0 is empty, V_n is fixed
    };
    std::vector<CMatrix> da(n), db(n);
    da[0] = q.alpha[0];
    db[0] = q.beta[0];
    for (int i = 1; i < n; ++i) {
        da[i] = H(i + 1) * q.alpha[i] - q.alpha[i] * H(i);
        db[i] = H(i) * q.beta[i] - q.beta[i] * H(i + 1);
    }
    std::vector<CMatrix> out;
    for (int m = 1; m < n; ++m) {
        CMatrix d = CMatrix::Zero(m, m);
        if (m >= 2) {
            const CMatrix t1 = da[m - 1] * q.alpha[m - 1].adjoint();
            const CMatrix t2 = db[m - 1].adjoint() * q.beta[m - 1];
            d += t1 + t1.adjoint() - t2 - t2.adjoint();
        }
        const CMatrix t3 = db[m] * q.beta[m].adjoint();
        const CMatrix t4 = da[m].adjoint() * q.alpha[m];
        d += t3 + t3.adjoint() - t4 - t4.adjoint();
        out.push_back(d);
    }
    return out;
}

struct Step {
    Quiver q;
    std::vector<CMatrix> g;
};

Step flow_step(const Quiver& q, const std::vector<CMatrix>& d, double eps)
{
    Step s;
    s.q = q;
    const int n = q.n;
    std::vector<CMatrix> g(n), ginv(n);
    for (int i = 1; i < n; ++i) {
        g[i - 1] = hermitian_exp(d[i - 1], -eps);
        ginv[i - 1] = hermitian_exp(d[i - 1], eps);
    }
    g[n - 1] = CMatrix::Identity(n, n);
    ginv[n - 1] = CMatrix::Identity(n, n);
    for (int i = 1; i < n; ++i) {
        s.q.alpha[i] = g[i] * q.alpha[i] * ginv[i - 1];
        s.q.beta[i] = g[i - 1] * q.beta[i] * ginv[i];
    }
    s.g = std::move(g);
    return s;
}

double energy_of(const std::vector<CMatrix>& d)
{
    double e = 0;
    for (const auto& m : d)
        e += m.squaredNorm();
    return e;
}

double max_norm(const std::vector<CMatrix>& d)
{
    double r = 0;
    for (const auto& m : d)
        r = std::max(r, m.norm());
    return r;
}

}  // namespace

std::vector<CMatrix> balance_defects(const Quiver& q, const MomentScalars& target, GaugeGroup group)
{
    check_target(q, target);
    std::vector<CMatrix> out;
    for (int m = 1; m < q.n; ++m) {
        CMatrix d = real_defect(q, m);
        if (group == GaugeGroup::Special)
            d = trace_free(d);
        else
            d.diagonal().array() -= target.r(m);
        // keep exactly Hermitian so the exponential stays positive definite
        out.push_back(0.5 * (d + d.adjoint()));
    }
    return out;
}

double kempf_ness_energy(const Quiver& q, const MomentScalars& target, GaugeGroup group)
{
    return energy_of(balance_defects(q, target, group));
}

double balance_residual(const Quiver& q, const MomentScalars& target, GaugeGroup group)
{
    return max_norm(balance_defects(q, target, group));
}

BalanceReport balance(const Quiver& q, const MomentScalars& target, const BalanceParams& params)
{
    q.validate();
    check_target(q, target);
    if (!(params.tol > 0) || !(params.backtrack > 0 && params.backtrack < 1) || !(params.step0 > 0))
        throw InputError("balance: invalid parameters");
    const double c0 = complex_residual(q, target);
    if (c0 > 1e-8)
        throw PreconditionViolated("balance: complex residual " + std::to_string(c0) +
                                   " exceeds 1e-8 for the target lambda^C");

    BalanceReport rep;
    rep.quiver = q;
    for (int i = 1; i <= q.n; ++i)
        rep.gauge.push_back(CMatrix::Identity(i, i));

    std::vector<CMatrix> d = balance_defects(q, target, params.group);
    double energy = energy_of(d);
    rep.residual = max_norm(d);
    rep.energy_trace.push_back(energy);
    rep.trace.push_back({0, energy, rep.residual, 0.0});

    double last_step = 0.0;
    bool stalled = false;
    int it = 0;
    while (rep.residual > params.tol) {
        if (it >= params.max_iter)
            break;
        ++it;
        std::vector<CMatrix> h;
        for (const auto& m : d)
            h.push_back(-m);
        const auto dmu = moment_derivative(rep.quiver, h);
        double slope = 0;
        for (std::size_t i = 0; i < d.size(); ++i)
            slope += 2.0 * (d[i] * dmu[i]).trace().real();
        if (!(slope < 0)) {
            stalled = true;
            break;
        }
        double eps = last_step > 0 ? std::min(params.max_step, 2.0 * last_step) : params.step0;
        bool accepted = false;
        Step cand;
        std::vector<CMatrix> cand_d;
        double cand_energy = 0;
        for (int tries = 0; tries < 200; ++tries) {
            cand = flow_step(rep.quiver, d, eps);
            cand_d = balance_defects(cand.q, target, params.group);
            cand_energy = energy_of(cand_d);
            if (cand_energy < energy && cand_energy <= energy + params.armijo * eps * slope) {
                accepted = true;
                break;
            }
            eps *= params.backtrack;
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        rep.quiver = std::move(cand.q);
        for (int i = 0; i < q.n; ++i)
            rep.gauge[i] = cand.g[i] * rep.gauge[i];
        d = std::move(cand_d);
        energy = cand_energy;
        rep.residual = max_norm(d);
        last_step = eps;
        rep.energy_trace.push_back(energy);
        rep.trace.push_back({it, energy, rep.residual, eps});
        if (it % 100 == 0) {
            const double drift = complex_residual(rep.quiver, target);
            if (drift > 1e-6)
                throw ComplexDrift("balance: complex residual drifted to " + std::to_string(drift) +
                                   " at iteration " + std::to_string(it));
        }
    }
    rep.iterations = it;
    rep.converged = rep.residual <= params.tol;
    if (!rep.converged) {
        const std::string why = stalled ? "line search stalled" : "iteration limit reached";
        throw MaxIterExceeded("balance: " + why + " with residual " + std::to_string(rep.residual) +
                                  " after " + std::to_string(it) + " iterations",
                              std::move(rep));
    }
    return rep;
}

CMatrix phi_from_quiver(const Quiver& q)
{
    q.validate();
    const double r = real_residual(q, MomentScalars::zero(q.n));
    if (r > 1e-6)
        throw PreconditionViolated("phi_from_quiver: quiver is not balanced (real residual " +
                                   std::to_string(r) + ")");
    const CMatrix& a = q.alpha[q.n - 1];
    const CMatrix& b = q.beta[q.n - 1];
    return cplx(0, 1) * (gram(a) - cogram(b));
}

}  // namespace quiverhk
