// Acceptance checks, one PASS/FAIL line per criterion.  Run a single criterion
// with --criterion k, or all of them with no arguments.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "quiverhk/balancer.hpp"
#include "quiverhk/nilcone.hpp"
#include "quiverhk/sigma.hpp"
#include "quiverhk/strata.hpp"

using namespace quiverhk;

namespace {

// Tolerances, fixed here so that any change shows up in review.
constexpr double kPhi2Tol = 1e-8;
constexpr double kPhi3BalancerTol = 1e-6;
constexpr double kPhi3ParamTol = 1e-8;
constexpr double kIdentityTol = 1e-10;
constexpr double kEquivarianceTol = 1e-6;
constexpr double kIdentityResidualTol = 1e-8;
constexpr double kSectionEquivarianceTol = 1e-9;
constexpr double kRealityTol = 1e-10;
constexpr double kNilpotentTol = 1e-6;
constexpr double kHypertoricTol = 1e-10;
constexpr double kInjectivityGap = 1e-6;
constexpr double kWitnessTol = 1e-13;
constexpr double kChartTol = 1e-10;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Quiver random_solution(int n, std::uint64_t seed)
{
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    return random_complex_solution(n, random_complex(n - 1, 1, rng).col(0), seed);
}

CMatrix random_nilpotent(int n, Rng& rng)
{
    CMatrix t = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            t(i, j) = random_complex_scalar(rng);
    const CMatrix u = haar_unitary(n, rng);
    return u * t * u.adjoint();
}

CMatrix jordan(const std::vector<int>& blocks)
{
    int n = 0;
    for (int b : blocks)
        n += b;
    CMatrix x = CMatrix::Zero(n, n);
    int at = 0;
    for (int b : blocks) {
        for (int i = 0; i + 1 < b; ++i)
            x(at + i, at + i + 1) = 1.0;
        at += b;
    }
    return x;
}

HypertoricQuiver random_hypertoric(int n, std::uint64_t seed)
{
    Rng rng(seed);
    CVector lc(n - 1);
    Eigen::VectorXd lr(n - 1);
    for (int i = 0; i < n - 1; ++i) {
        lc(i) = random_complex_scalar(rng);
        lr(i) = random_uniform(rng, -1.0, 1.0);
    }
    return balanced_hypertoric(n, lc, lr, seed);
}

// ---------------------------------------------------------------------------

Outcome phi2_oracle()
{
    double worst = 0;
    for (double d : {0.5, 1.0, 2.0}) {
        CMatrix x = CMatrix::Zero(2, 2);
        x(0, 1) = d;
        CMatrix expect = CMatrix::Zero(2, 2);
        expect(0, 0) = cplx(0, d);
        expect(1, 1) = cplx(0, -d);
        worst = std::max(worst, (phi_n(x, PhiMethod::Balancer) - expect).norm());
    }
    return {worst <= kPhi2Tol, "max deviation " + fmt(worst)};
}

Outcome phi3_oracle()
{
    Rng rng(2024);
    double bal = 0, param = 0;
    for (int t = 0; t < 100; ++t) {
        const double a = random_uniform(rng, 0.5, 2.0);
        const double c = random_uniform(rng, 0.5, 2.0);
        const cplx b = std::polar(random_uniform(rng, 0.5, 2.0), random_uniform(rng, 0.0, 2 * M_PI));
        CMatrix am(2, 2);
        am << a, b, 0, c;
        const Phi3Closed cf = phi3_closed(a, b, c);
        bal = std::max(bal, (phi_n(block_nilpotent(am), PhiMethod::Balancer) - cf.phi).norm());
        const CMatrix bm = recursive_B_solve(am).B;
        // B = [[alpha, beta], [0, 1/gamma]]
        param = std::max({param, std::abs(1.0 / bm(1, 1).real() - cf.gamma), std::abs(bm(0, 0) - cf.alpha),
                          std::abs(bm(0, 1) - cf.beta)});
    }
    CMatrix ones(2, 2);
    ones << 1, 1, 0, 1;
    const double id = (recursive_B_solve(ones).B - CMatrix::Identity(2, 2)).norm();
    Outcome o;
    o.pass = bal <= kPhi3BalancerTol && param <= kPhi3ParamTol && id <= kIdentityTol;
    o.detail = "balancer vs closed form " + fmt(bal) + (bal <= kPhi3BalancerTol ? " ok" : " FAIL") +
               "; Newton (gamma, alpha, beta) " + fmt(param) + (param <= kPhi3ParamTol ? " ok" : " FAIL") +
               "; B at a=b=c=1 " + fmt(id) + (id <= kIdentityTol ? " ok" : " FAIL");
    return o;
}

Outcome phi_equivariance()
{
    Rng rng(3);
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 3;
        const CMatrix eta = random_nilpotent(n, rng);
        const CMatrix k = haar_special_unitary(n, rng);
        const CMatrix lhs = phi_n(CMatrix(k * eta * k.adjoint()));
        const CMatrix rhs = k * phi_n(eta) * k.adjoint();
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return {worst <= kEquivarianceTol, "max deviation " + fmt(worst)};
}

Outcome characteristic_identity()
{
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 4;
        const Quiver q = random_solution(n, 1000 + t);
        worst = std::max(worst, characteristic_residual(q, infer_scalars(q).scalars));
    }
    return {worst <= kIdentityResidualTol, "max residual " + fmt(worst)};
}

Outcome xk_and_wedge()
{
    double xk = 0, wedge = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 4;
        const Quiver q = random_solution(n, 1000 + t);
        xk = std::max(xk, xk_recursion_residual(q, infer_scalars(q).scalars));
        for (int k = 1; k < n; ++k)
            wedge = std::max(wedge, lemma59_residual(q, k));
    }
    return {xk <= kIdentityResidualTol && wedge <= kIdentityResidualTol,
            "X_k recursion " + fmt(xk) + ", wedge identity " + fmt(wedge)};
}

Outcome sigma_su2()
{
    Rng rng(6);
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 4;
        const Quiver q = random_solution(n, 2000 + t);
        const auto [u1, v1] = random_su2(rng);
        const SigmaSection rotated = sigma(su2_act(q, u1, v1));
        const SigmaSection base = sigma(q);
        for (const auto& [u, v] : unit_samples(16, 3000 + t)) {
            const SectionValue lhs = evaluate_section(rotated, u, v);
            const SectionValue rhs = evaluate_section(base, u * u1 - v * std::conj(v1), u * v1 + v * std::conj(u1));
            worst = std::max(worst, value_distance(lhs, rhs));
        }
    }
    return {worst <= kSectionEquivarianceTol, "max deviation " + fmt(worst)};
}

Outcome reality()
{
    double worst = 0;
    int count = 0;
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 4;
        worst = std::max(worst, reality_residual(sigma(random_solution(n, 2000 + t))));
        worst = std::max(worst, reality_residual(sigma(hypertoric_build(random_hypertoric(n, 4000 + t)))));
        count += 2;
    }
    return {worst <= kRealityTol, std::to_string(count) + " sections, max defect " + fmt(worst)};
}

Outcome rotation_nilpotency()
{
    Rng rng(8);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + t % 3;
        const CMatrix eta = random_nilpotent(n, rng);
        const auto [u, v] = random_su2(rng);
        worst = std::max(worst, clustered_spectral_radius(su2_rotate_nilpotent(eta, u, v)));
    }
    return {worst <= kNilpotentTol, "max eigenvalue modulus " + fmt(worst)};
}

Outcome hypertoric_closed_form()
{
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        const HypertoricQuiver hq = random_hypertoric(2 + t % 4, 5000 + t);
        worst = std::max(worst, section_distance(hypertoric_sigma(hq), sigma(hypertoric_build(hq))));
    }
    return {worst <= kHypertoricTol, "max coefficient difference " + fmt(worst)};
}

Outcome stratification()
{
    std::ostringstream bad;
    for (const auto& type : std::vector<std::vector<int>>{{3}, {2, 1}, {1, 1, 1}}) {
        const Quiver q = quiver_from_nilpotent(jordan(type));
        const Quiver b = balance(q, MomentScalars::zero(3)).quiver;
        const StratumLabel l = classify(b).label;
        if (!(l.partition == SetPartition{{1, 2, 3}} && l.orbits == std::vector<std::vector<int>>{type}))
            bad << " Jordan type " << type.size() << " blocks misclassified;";
    }
    for (int t = 0; t < 10; ++t) {
        const int n = 2 + t % 4;
        const StratumLabel l = classify(hypertoric_build(random_hypertoric(n, 6000 + t))).label;
        bool ok = static_cast<int>(l.partition.size()) == n;
        for (int i = 0; ok && i < n; ++i)
            ok = l.partition[i] == std::vector<int>{i + 1} && l.orbits[i] == std::vector<int>{1};
        if (!ok)
            bad << " hypertoric instance " << t << " misclassified;";
    }
    const std::string b = bad.str();
    return {b.empty(), b.empty() ? "3 Jordan types and 10 hypertoric instances" : b};
}

Outcome injectivity()
{
    double gap = INFINITY;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + t % 3;
        const Quiver a = random_solution(n, 7000 + 2 * t);
        const Quiver b = random_solution(n, 7001 + 2 * t);
        gap = std::min(gap, section_distance(sigma(a), sigma(b)));
    }

    // Twistor coordinates (0, beta) at zeta come from the quiver
    // alpha = -zeta beta^* / (1 + |zeta|^2), beta / (1 + |zeta|^2).
    Rng rng(9);
    double witness = 0;
    bool zeta_kept = true;
    for (int t = 0; t < 20; ++t) {
        const cplx zeta = t == 0 ? cplx(0, 0) : random_complex_scalar(rng);
        const CMatrix beta = random_complex(1, 2, rng);
        const double s = 1.0 + std::norm(zeta);
        Quiver q = Quiver::zero(2);
        q.beta[1] = beta / s;
        q.alpha[1] = -zeta * beta.adjoint() / s;
        const SigmaTilde st = sigma_tilde(q, zeta);
        witness = std::max({witness, st.value.K.norm(), st.value.T.norm(), st.value.rho[0].norm()});
        zeta_kept = zeta_kept && st.zeta == zeta;
    }
    return {gap > kInjectivityGap && witness <= kWitnessTol && zeta_kept,
            "min section distance " + fmt(gap) + ", witness image norm " + fmt(witness)};
}

Outcome n2_chart()
{
    Rng rng(12);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        Quiver q = Quiver::zero(2);
        q.alpha[1] = random_complex(2, 1, rng);
        q.beta[1] = random_complex(1, 2, rng);
        const cplx zeta = random_complex_scalar(rng);
        const SectionValue v = evaluate_section(sigma(q), 1.0, zeta);
        const CMatrix az = q.alpha[1] + zeta * q.beta[1].adjoint();
        const CMatrix bz = -zeta * q.alpha[1].adjoint() + q.beta[1];
        const CMatrix ab = az * bz;
        const CMatrix k = ab - 0.5 * ab.trace() * CMatrix::Identity(2, 2);
        // the torus component is the node-1 scalar, -beta alpha
        const cplx tz = -(bz * az)(0, 0);
        worst = std::max({worst, (v.K - k).norm(), std::abs(v.T(0) - tz), (v.rho[0] - az.col(0)).norm()});
    }
    return {worst <= kChartTol, "max deviation " + fmt(worst)};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {"Phi_2 oracle", phi2_oracle},
        {"Phi_3 oracle", phi3_oracle},
        {"SU(n)-equivariance of Phi", phi_equivariance},
        {"characteristic identity", characteristic_identity},
        {"X_k recursion and wedge identity", xk_and_wedge},
        {"SU(2)-equivariance of sigma", sigma_su2},
        {"reality of rho_K and rho_T", reality},
        {"rotation nilpotency", rotation_nilpotency},
        {"hypertoric closed form", hypertoric_closed_form},
        {"stratification", stratification},
        {"empirical injectivity and the sigma-tilde witness", injectivity},
        {"n = 2 twistor chart", n2_chart},
    };
    return all;
}

bool report(int k)
{
    const Criterion& c = criteria()[k - 1];
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", k, c.name, o.detail.c_str());
    return o.pass;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app("quiverhk acceptance checks");
    int only = 0;
    app.add_option("--criterion", only, "criterion number")->check(CLI::Range(1, 12));
    CLI11_PARSE(app, argc, argv);

    bool ok = true;
    if (only > 0) {
        ok = report(only);
    } else {
        for (int k = 1; k <= static_cast<int>(criteria().size()); ++k)
            ok = report(k) && ok;
    }
    return ok ? 0 : 1;
}
