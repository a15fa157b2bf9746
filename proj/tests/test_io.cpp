#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "quiverhk/io.hpp"

using namespace quiverhk;
using io::json;

namespace {

Quiver random_solution(int n, std::uint64_t seed)
{
    Rng rng(seed);
    return random_complex_solution(n, random_complex(n - 1, 1, rng).col(0), seed);
}

bool same(const Quiver& a, const Quiver& b)
{
    if (a.n != b.n)
        return false;
    for (int i = 1; i < a.n; ++i)
        if (a.alpha[i] != b.alpha[i] || a.beta[i] != b.beta[i])
            return false;
    return true;
}

}  // namespace

TEST_CASE("complex numbers and matrices")
{
    const cplx z(0.1, -3.25e-17);
    CHECK(io::to_json(z) == json::array({0.1, -3.25e-17}));
    CHECK(io::complex_from_json(io::to_json(z)) == z);
    CHECK(io::complex_from_json(json(2.5)) == cplx(2.5, 0));
    CHECK_THROWS_AS(io::complex_from_json(json("1+2i")), InputError);
    CHECK_THROWS_AS(io::complex_from_json(json::array({1, 2, 3})), InputError);

    CMatrix m(2, 3);
    m << cplx(1, 2), 3, cplx(0, -1), 4, cplx(5, 6), 1e-300;
    const json j = io::to_json(m);
    CHECK(j["rows"] == 2);
    CHECK(j["cols"] == 3);
    CHECK(j["data"][1] == json::array({3.0, 0.0}));  // row-major
    CHECK(io::matrix_from_json(j) == m);
    CHECK(io::matrix_from_json(io::parse(io::dump(j))) == m);

    const CMatrix empty(0, 4);
    const CMatrix back = io::matrix_from_json(io::to_json(empty));
    CHECK(back.rows() == 0);
    CHECK(back.cols() == 4);

    json bad = j;
    bad["data"].erase(0);
    CHECK_THROWS_AS(io::matrix_from_json(bad), InputError);
    CHECK_THROWS_AS(io::matrix_from_json(json{{"rows", 1}}), InputError);

    CVector v(3);
    v << 1, cplx(0, 1), -2;
    CHECK(io::vector_from_json(io::vector_to_json(v)) == v);
}

TEST_CASE("quiver round trip")
{
    for (int n = 1; n <= 5; ++n) {
        const Quiver q = n == 1 ? Quiver::zero(1) : random_solution(n, 10 + n);
        const json j = io::to_json(q);
        CHECK(j["alpha"].size() == static_cast<std::size_t>(n - 1));
        CHECK(same(io::quiver_from_json(io::parse(io::dump(j))), q));
    }

    // a leading empty edge is accepted and skipped
    const Quiver q = random_solution(3, 4);
    json j = io::to_json(q);
    j["alpha"].insert(j["alpha"].begin(), io::to_json(CMatrix(1, 0)));
    j["beta"].insert(j["beta"].begin(), io::to_json(CMatrix(0, 1)));
    CHECK(same(io::quiver_from_json(j), q));

    json wrong = io::to_json(q);
    wrong["alpha"][0] = io::to_json(CMatrix::Zero(2, 2));
    CHECK_THROWS_AS(io::quiver_from_json(wrong), InputError);
    json missing = io::to_json(q);
    missing.erase("beta");
    CHECK_THROWS_AS(io::quiver_from_json(missing), InputError);
}

TEST_CASE("hypertoric, section and label round trips")
{
    Rng rng(3);
    HypertoricQuiver hq = HypertoricQuiver::zero(4);
    for (int k = 1; k < 4; ++k) {
        hq.nu[k - 1] = random_complex(k, 1, rng).col(0);
        hq.mu[k - 1] = random_complex(k, 1, rng).col(0);
    }
    const HypertoricQuiver hb = io::hypertoric_from_json(io::parse(io::dump(io::to_json(hq))));
    CHECK(hb.n == 4);
    for (int k = 1; k < 4; ++k) {
        CHECK(hb.nu[k - 1] == hq.nu[k - 1]);
        CHECK(hb.mu[k - 1] == hq.mu[k - 1]);
    }

    const SigmaSection s = sigma(random_solution(4, 9));
    const json sj = io::to_json(s);
    CHECK(sj["rho"].contains("1"));
    CHECK(sj["rho"]["2"].size() == 5);
    const SigmaSection sb = io::section_from_json(io::parse(io::dump(sj)));
    CHECK(section_distance(s, sb) == 0.0);

    const StratumLabel label{{{1, 3}, {2}}, {{2}, {1}}};
    const json lj = io::to_json(label);
    CHECK(lj == io::parse(R"({"partition": [[1,3],[2]], "orbits": {"1,3": [2], "2": [1]}})"));
    CHECK(io::label_from_json(lj) == label);

    Classification c;
    c.label = label;
    c.v = cplx(0.6, 0.0);
    c.u = cplx(0.8, 0.0);
    const json cj = io::to_json(c);
    CHECK(cj["rotation"]["v"] == json::array({0.6, 0.0}));
    CHECK(cj["partition"] == lj["partition"]);
}

TEST_CASE("parse and file errors")
{
    CHECK_THROWS_AS(io::parse("{not json"), InputError);
    CHECK_THROWS_AS(io::read_file("/nonexistent/quiverhk/input.json"), InputError);

    const std::string path = "quiverhk_io_test.json";
    {
        std::ofstream f(path);
        f << io::dump(io::to_json(Quiver::zero(2)));
    }
    CHECK(same(io::quiver_from_json(io::read_file(path)), Quiver::zero(2)));
    std::remove(path.c_str());
}

TEST_CASE("dump is deterministic and indented")
{
    const json j = io::to_json(random_solution(3, 5));
    const std::string a = io::dump(j);
    CHECK(a == io::dump(io::parse(a)));
    CHECK(a.find("\n  \"") != std::string::npos);
}
