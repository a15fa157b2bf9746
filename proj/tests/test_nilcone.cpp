#include <doctest.h>

#include "oracles.hpp"
#include "quiverhk/nilcone.hpp"

using namespace quiverhk;

namespace {

const cplx I(0, 1);

CMatrix j2(double d = 1.0)
{
    CMatrix x = CMatrix::Zero(2, 2);
    x(0, 1) = d;
    return x;
}

CMatrix diag_i(double d)
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = I * d;
    m(1, 1) = -I * d;
    return m;
}

CMatrix upper2(double a, cplx b, double c)
{
    CMatrix m(2, 2);
    m << a, b, 0, c;
    return m;
}

struct Draw {
    double a, c;
    cplx b;
};

Draw draw_abc(Rng& rng)
{
    const double a = random_uniform(rng, 0.5, 2.0);
    const double c = random_uniform(rng, 0.5, 2.0);
    const cplx b = std::polar(random_uniform(rng, 0.5, 2.0), random_uniform(rng, 0.0, 2 * M_PI));
    return {a, c, b};
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

TEST_CASE("Phi_2 on [[0,d],[0,0]] for every method")
{
    for (double d : {0.5, 1.0, 2.0})
        for (PhiMethod m : {PhiMethod::Closed2, PhiMethod::Recursive, PhiMethod::Balancer})
            CHECK((phi_n(j2(d), m) - diag_i(d)).norm() < 1e-8);
}

TEST_CASE("Phi of zero is zero")
{
    for (PhiMethod m : {PhiMethod::Closed2, PhiMethod::Recursive, PhiMethod::Balancer})
        CHECK(phi_n(CMatrix::Zero(2, 2), m).norm() == 0.0);
    CHECK(phi_n(CMatrix::Zero(4, 4)).norm() == 0.0);
}

TEST_CASE("closed n = 3 values")
{
    const Phi3Closed one = phi3_closed(1.0, 1.0, 1.0);
    CHECK(one.gamma == doctest::Approx(1.0));
    CHECK(one.alpha == doctest::Approx(1.0));
    CHECK(std::abs(one.beta) < 1e-15);
    CHECK(one.delta == doctest::Approx(1.0));
    CMatrix expect(3, 3);
    expect << 2, 1, 0, 1, 0, -1, 0, -1, -2;
    CHECK((one.phi - I * expect).norm() < 1e-14);

    // a = c = 1, b = 2: |b|(a+c) = 4, bc^2/|b| = 1
    CMatrix expect2(3, 3);
    expect2 << 4, 1, 0, 1, 0, -1, 0, -1, -4;
    CHECK((phi3_closed(1.0, 2.0, 1.0).phi - I * expect2).norm() < 1e-14);

    // a phase on b rotates the off-diagonal entries only
    const double theta = 0.7;
    const CMatrix p0 = phi3_closed(1.3, 0.8, 0.6).phi;
    const CMatrix pt = phi3_closed(1.3, std::polar(0.8, theta), 0.6).phi;
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(pt(i, i) - p0(i, i)) < 1e-14);
    CHECK(std::abs(pt(0, 1) - std::polar(1.0, theta) * p0(0, 1)) < 1e-14);
    CHECK(std::abs(pt(1, 2) - std::polar(1.0, theta) * p0(1, 2)) < 1e-14);

    CHECK_THROWS_AS(phi3_closed(1.0, 0.0, 1.0), InputError);
    CHECK_THROWS_AS(phi3_closed(-1.0, 1.0, 1.0), InputError);
}

TEST_CASE("the J3 example through the printed recursion")
{
    CMatrix x(3, 3);
    x << 0, 1, 2, 0, 0, 1, 0, 0, 0;
    CMatrix expect(3, 3);
    expect << 2, 1, 0, 1, 0, -1, 0, -1, -2;
    CHECK((phi_n(x, PhiMethod::Closed3) - I * expect).norm() < 1e-10);
    CHECK((phi_n(x, PhiMethod::Recursive) - I * expect).norm() < 1e-10);
}

TEST_CASE("B-equation solver")
{
    const BSolve id = recursive_B_solve(upper2(1, 1, 1));
    CHECK((id.B - CMatrix::Identity(2, 2)).norm() < 1e-10);

    CMatrix scalar(1, 1);
    scalar << 1.7;
    CHECK((recursive_B_solve(scalar).B - CMatrix::Identity(1, 1)).norm() == 0.0);

    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const Draw d = draw_abc(rng);
        const BSolve s = recursive_B_solve(upper2(d.a, d.b, d.c));
        const Phi3Closed cf = phi3_closed(d.a, d.b, d.c);
        // B = [[alpha, beta], [0, 1/gamma]]
        CHECK(std::abs(s.B(0, 0) - cf.alpha) < 1e-8);
        CHECK(std::abs(s.B(1, 1) - 1.0 / cf.gamma) < 1e-8);
        CHECK(std::abs(s.B(0, 1) - cf.beta) < 1e-8);
        CHECK(std::abs(s.B(1, 0)) == 0.0);
        CHECK(s.residual <= 1e-8);
    }
}

TEST_CASE("method agreement where the conventions coincide")
{
    Rng rng(9);
    PhiOptions moment;
    moment.convention = BConvention::MomentConsistent;
    for (int t = 0; t < 100; ++t) {
        const Draw d = draw_abc(rng);
        const CMatrix x = block_nilpotent(upper2(d.a, d.b, d.c));
        const CMatrix closed = phi_n(x, PhiMethod::Closed3);
        CHECK((phi_n(x, PhiMethod::Recursive) - closed).norm() <= 1e-6);
        CHECK((phi3_closed(d.a, d.b, d.c).phi - closed).norm() <= 1e-8);
        CHECK((phi_n(x, PhiMethod::Balancer) - phi_n(x, PhiMethod::Recursive, moment)).norm() <= 1e-6);
    }
    for (int t = 0; t < 100; ++t) {
        const CMatrix x = regular_nilpotent(2, rng);
        const CMatrix c = phi_n(x, PhiMethod::Closed2);
        CHECK((phi_n(x, PhiMethod::Balancer) - c).norm() <= 1e-6);
        CHECK((phi_n(x, PhiMethod::Recursive) - c).norm() <= 1e-6);
    }
    for (int t = 0; t < 3; ++t) {
        const CMatrix x = regular_nilpotent(4, rng);
        CHECK((phi_n(x, PhiMethod::Balancer) - phi_n(x, PhiMethod::Recursive, moment)).norm() <= 1e-6);
    }
}

TEST_CASE("Phi lands in su(n) and is unitarily equivariant")
{
    Rng rng(13);
    for (int n = 2; n <= 4; ++n)
        for (int t = 0; t < 5; ++t) {
            const CMatrix eta = regular_nilpotent(n, rng);
            const PhiResult r = phi_n_detailed(eta, PhiMethod::Balancer);
            CHECK(r.skew_residual <= 1e-8);
            CHECK(r.trace_residual <= 1e-8);
            const CMatrix k = haar_special_unitary(n, rng);
            const CMatrix lhs = phi_n(CMatrix(k * eta * k.adjoint()));
            CHECK((lhs - k * r.phi * k.adjoint()).norm() <= 1e-6 * (1 + r.phi.norm()));
        }
}

TEST_CASE("non-regular input routes to the balancer")
{
    CMatrix x = CMatrix::Zero(3, 3);
    x(0, 2) = 1.0;
    const PhiResult r = phi_n_detailed(x, PhiMethod::Closed3);
    CHECK(r.method == PhiMethod::Balancer);
    CHECK(r.skew_residual <= 1e-8);
}

TEST_CASE("argument errors")
{
    CHECK_THROWS_AS(phi_n(CMatrix::Zero(3, 3), PhiMethod::Closed2), ShapeError);
    CHECK_THROWS_AS(phi_n(CMatrix::Zero(2, 2), PhiMethod::Closed3), ShapeError);
    CHECK_THROWS_AS(phi_n(CMatrix::Identity(2, 2)), NotNilpotent);
    CHECK_THROWS_AS(parse_phi_method("newton"), InputError);
    for (PhiMethod m : {PhiMethod::Closed2, PhiMethod::Closed3, PhiMethod::Recursive, PhiMethod::Balancer})
        CHECK(parse_phi_method(to_string(m)) == m);
}

TEST_CASE("SU(2) rotation of a nilpotent element")
{
    const CMatrix eta = j2();
    CHECK((su2_rotate_nilpotent(eta, 1.0, 0.0) - eta).norm() < 1e-14);
    CHECK((su2_rotate_nilpotent(eta, 0.0, 1.0) + eta.adjoint()).norm() < 1e-14);
    const double h = 1.0 / std::sqrt(2.0);
    CMatrix expect(2, 2);
    expect << -0.5, 0.5, -0.5, 0.5;
    const CMatrix r = su2_rotate_nilpotent(eta, h, h);
    CHECK((r - expect).norm() < 1e-12);
    CHECK(std::abs(oracle::det(r)) < 1e-14);

    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + t % 3;
        const CMatrix x = regular_nilpotent(n, rng);
        const auto [u, v] = random_su2(rng);
        const CMatrix y = su2_rotate_nilpotent(x, u, v);
        CHECK(clustered_spectral_radius(y, 1e-6) <= 1e-6 * (1 + x.norm()));
    }
    CHECK_THROWS_AS(su2_rotate_nilpotent(eta, 1.0, 1.0), InputError);
}

TEST_CASE("twistor line of a nilpotent element")
{
    const TwistorQuadratic zero = twistor_section_of(CMatrix::Zero(3, 3));
    for (const auto& c : zero.coeff)
        CHECK(c.norm() == 0.0);

    const TwistorQuadratic t = twistor_section_of(j2());
    CMatrix mid = CMatrix::Zero(2, 2);
    mid(0, 0) = -1;
    mid(1, 1) = 1;
    CHECK((t.coeff[0] - j2()).norm() < 1e-12);
    CHECK((t.coeff[1] - mid).norm() < 1e-8);
    CHECK((t.coeff[2] + j2().transpose()).norm() < 1e-12);

    Rng rng(23);
    for (int n = 2; n <= 3; ++n) {
        const CMatrix x = regular_nilpotent(n, rng);
        const TwistorQuadratic q = twistor_section_of(x);
        CHECK((q.coeff[2] + q.coeff[0].adjoint()).norm() < 1e-12);
        CHECK((q.coeff[1] - q.coeff[1].adjoint()).norm() < 1e-8);
        const auto [u, v] = random_su2(rng);
        CHECK((q.evaluate(u, v) - su2_rotate_nilpotent(x, u, v)).norm() < 1e-8 * (1 + x.norm()));
        // reality: the antipodal value is minus the adjoint
        CHECK((q.evaluate(-std::conj(v), std::conj(u)) + q.evaluate(u, v).adjoint()).norm() < 1e-8 * (1 + x.norm()));
    }
}

TEST_CASE("real structure on the nilpotent cone")
{
    const auto [x1, z1] = nilcone_real_structure(j2(), 1.0);
    CHECK((x1 + j2().adjoint()).norm() == 0.0);
    CHECK(z1 == cplx(-1, 0));

    const auto [x2, z2] = nilcone_real_structure(j2(), 2.0);
    CHECK((x2 + j2().transpose() / 4.0).norm() < 1e-15);
    CHECK(std::abs(z2 + 0.5) < 1e-15);

    Rng rng(29);
    const CMatrix x = random_complex(3, 3, rng);
    const cplx zeta(0.3, -1.2);
    const auto [y, w] = nilcone_real_structure(x, zeta);
    const auto [xx, zz] = nilcone_real_structure(y, w);
    CHECK((xx - x).norm() < 1e-14);
    CHECK(std::abs(zz - zeta) < 1e-15);
    CHECK_THROWS_AS(nilcone_real_structure(x, 0.0), InputError);
}
