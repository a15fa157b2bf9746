#include <doctest.h>

#include "oracles.hpp"
#include "quiverhk/balancer.hpp"

using namespace quiverhk;

namespace {

Quiver two_node(cplx a0, cplx a1, cplx b0, cplx b1)
{
    Quiver q = Quiver::zero(2);
    q.alpha[1] << a0, a1;
    q.beta[1] << b0, b1;
    return q;
}

MomentScalars zero_target(const Quiver& q)
{
    MomentScalars t = infer_scalars(q).scalars;
    t.lambda_r.setZero();
    return t;
}

CMatrix regular_nilpotent(int n, Rng& rng)
{
    CMatrix j = CMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i)
        j(i, i + 1) = 1.0;
    const CMatrix p = random_complex(n, n, rng) + 2.0 * CMatrix::Identity(n, n);
    return p * j * p.inverse();
}

}  // namespace

TEST_CASE("Kempf-Ness energy by hand")
{
    CHECK(kempf_ness_energy(Quiver::zero(3), MomentScalars::zero(3), GaugeGroup::Unitary) == 0.0);
    for (double d : {0.5, 2.0}) {
        const Quiver q = two_node(std::sqrt(d), 0, 0, std::sqrt(d));
        CHECK(kempf_ness_energy(q, MomentScalars::zero(2), GaugeGroup::Unitary) < 1e-28);
    }
    // node 1 defect is -|2|^2 + |1|^2 = -3
    const Quiver q = two_node(2, 0, 0, 1);
    CHECK(kempf_ness_energy(q, MomentScalars::zero(2), GaugeGroup::Unitary) == doctest::Approx(9.0));
    CHECK(balance_residual(q, MomentScalars::zero(2), GaugeGroup::Unitary) == doctest::Approx(3.0));
    // a 1x1 node has no trace-free part
    CHECK(kempf_ness_energy(q, MomentScalars::zero(2), GaugeGroup::Special) == 0.0);
}

TEST_CASE("an already balanced quiver is returned untouched")
{
    const Quiver q = two_node(1, 0, 0, 1);
    const BalanceReport r = balance(q, MomentScalars::zero(2));
    CHECK(r.iterations == 0);
    CHECK(r.converged);
    CHECK(r.residual == 0.0);
}

TEST_CASE("n = 2 balancing reaches the diagonal Phi")
{
    const Quiver q = two_node(2, 0, 0, 1);
    const BalanceReport r = balance(q, MomentScalars::zero(2));
    CHECK(r.converged);
    CHECK(r.residual <= 1e-9);
    CMatrix expect = CMatrix::Zero(2, 2);
    expect(0, 0) = cplx(0, 2);
    expect(1, 1) = cplx(0, -2);
    CHECK((phi_from_quiver(r.quiver) - expect).norm() < 1e-8);
}

TEST_CASE("balancing nilpotent quivers preserves X and the complex equations")
{
    Rng rng(3);
    for (int n = 3; n <= 4; ++n)
        for (int t = 0; t < 5; ++t) {
            const CMatrix x = regular_nilpotent(n, rng);
            const Quiver q = quiver_from_nilpotent(x);
            const BalanceReport r = balance(q, MomentScalars::zero(n));
            CHECK(r.converged);
            CHECK(r.iterations <= 10000);
            CHECK(real_residual(r.quiver, MomentScalars::zero(n)) <= 1e-8);
            CHECK(std::abs(real_residual(r.quiver, MomentScalars::zero(n)) - r.residual) <= 1e-12);
            CHECK((top_product(r.quiver) - top_product(q)).norm() <= 1e-9 * (1 + x.norm()));
            CHECK(complex_residual(r.quiver, MomentScalars::zero(n)) <= 1e-8 * (1 + x.norm()));
            for (std::size_t i = 1; i < r.energy_trace.size(); ++i)
                CHECK(r.energy_trace[i] < r.energy_trace[i - 1]);
            CHECK((gauge_act(q, r.gauge).alpha[n - 1] - r.quiver.alpha[n - 1]).norm() <= 1e-8 * (1 + x.norm()));
            const CMatrix phi = phi_from_quiver(r.quiver);
            CHECK((phi + phi.adjoint()).norm() <= 1e-8);
            CHECK(std::abs(phi.trace()) <= 1e-8);
        }
}

TEST_CASE("group consistency: special then unitary is a fixed point")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const int n = 3;
        const Quiver q = random_complex_solution(n, random_complex(n - 1, 1, rng).col(0), seed);
        BalanceParams special;
        special.group = GaugeGroup::Special;
        const BalanceReport r = balance(q, infer_scalars(q).scalars, special);
        CHECK(r.converged);
        const MomentScalars levels = infer_scalars(r.quiver).scalars;
        CHECK(real_residual(r.quiver, levels) <= 1e-9);
        const BalanceReport again = balance(r.quiver, levels);
        CHECK(again.iterations == 0);
    }
}

TEST_CASE("iteration limit reports the best point")
{
    const Quiver q = two_node(5, 0, 0, 0.1);
    BalanceParams p;
    p.max_iter = 1;
    try {
        balance(q, MomentScalars::zero(2), p);
        FAIL("expected MaxIterExceeded");
    } catch (const MaxIterExceeded& e) {
        CHECK(!e.report.converged);
        CHECK(e.report.residual < balance_residual(q, MomentScalars::zero(2), GaugeGroup::Unitary));
    }
}

TEST_CASE("balance rejects inputs off the complex equations")
{
    Rng rng(1);
    Quiver q = Quiver::zero(3);
    for (int k = 1; k < 3; ++k) {
        q.alpha[k] = random_complex(k + 1, k, rng);
        q.beta[k] = random_complex(k, k + 1, rng);
    }
    CHECK_THROWS_AS(balance(q, zero_target(q)), PreconditionViolated);
    BalanceParams bad;
    bad.backtrack = 1.5;
    CHECK_THROWS_AS(balance(Quiver::zero(2), MomentScalars::zero(2), bad), InputError);
}

TEST_CASE("phi_from_quiver")
{
    for (double d : {0.5, 1.0, 2.0}) {
        const Quiver q = two_node(std::sqrt(d), 0, 0, std::sqrt(d));
        CMatrix expect = CMatrix::Zero(2, 2);
        expect(0, 0) = cplx(0, d);
        expect(1, 1) = cplx(0, -d);
        CHECK((phi_from_quiver(q) - expect).norm() < 1e-14);
    }
    CHECK(phi_from_quiver(Quiver::zero(3)).norm() == 0.0);
    CHECK_THROWS_AS(phi_from_quiver(two_node(2, 0, 0, 1)), PreconditionViolated);
}
