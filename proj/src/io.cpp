#include "quiverhk/io.hpp"

#include <fstream>
#include <sstream>

namespace quiverhk::io {

namespace {

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        throw InputError(std::string("json: missing field \"") + key + "\"");
    return j.at(key);
}

double number(const json& j, const char* what)
{
    if (!j.is_number())
        throw InputError(std::string("json: expected a number for ") + what);
    return j.get<double>();
}

int integer(const json& j, const char* what)
{
    if (!j.is_number_integer())
        throw InputError(std::string("json: expected an integer for ") + what);
    return j.get<int>();
}

std::string block_key(const std::vector<int>& block)
{
    std::string key;
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (i)
            key += ',';
        key += std::to_string(block[i]);
    }
    return key;
}

}  // namespace

json to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

json to_json(const CMatrix& m)
{
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            data.push_back(to_json(m(r, c)));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json vector_to_json(const CVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(to_json(v(i)));
    return out;
}

json to_json(const Quiver& q)
{
    json a = json::array(), b = json::array();
    for (int k = 1; k < q.n; ++k) {
        a.push_back(to_json(q.alpha[k]));
        b.push_back(to_json(q.beta[k]));
    }
    return json{{"n", q.n}, {"alpha", a}, {"beta", b}};
}

json to_json(const HypertoricQuiver& hq)
{
    json nu = json::array(), mu = json::array();
    for (int k = 1; k < hq.n; ++k) {
        nu.push_back(vector_to_json(hq.nu[k - 1]));
        mu.push_back(vector_to_json(hq.mu[k - 1]));
    }
    return json{{"n", hq.n}, {"nu", nu}, {"mu", mu}};
}

json to_json(const SigmaSection& s)
{
    json rk = json::array(), rt = json::array(), rho = json::object();
    for (int k = 0; k < 3; ++k) {
        rk.push_back(to_json(s.rhoK[k]));
        rt.push_back(vector_to_json(s.rhoT[k]));
    }
    for (int j = 1; j < s.n; ++j) {
        json coeffs = json::array();
        for (const auto& c : s.rho[j - 1])
            coeffs.push_back(vector_to_json(c));
        rho[std::to_string(j)] = coeffs;
    }
    return json{{"n", s.n}, {"rhoK", rk}, {"rhoT", rt}, {"rho", rho}};
}

json to_json(const StratumLabel& label)
{
    json orbits = json::object();
    for (std::size_t b = 0; b < label.partition.size(); ++b)
        orbits[block_key(label.partition[b])] = label.orbits.at(b);
    return json{{"partition", label.partition}, {"orbits", orbits}};
}

json to_json(const Classification& c)
{
    json out = to_json(c.label);
    out["rotation"] = json{{"u", to_json(c.u)}, {"v", to_json(c.v)}};
    return out;
}

json to_json(const PhiResult& r)
{
    return json{{"phi", to_json(r.phi)},
                {"method", to_string(r.method)},
                {"skew_residual", r.skew_residual},
                {"trace_residual", r.trace_residual},
                {"solver_residual", r.solver_residual},
                {"iterations", r.iterations}};
}

cplx complex_from_json(const json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2)
        throw InputError("json: complex numbers are [re, im]");
    return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

CMatrix matrix_from_json(const json& j)
{
    const int rows = integer(field(j, "rows"), "rows");
    const int cols = integer(field(j, "cols"), "cols");
    if (rows < 0 || cols < 0)
        throw InputError("json: negative matrix dimension");
    const json& data = field(j, "data");
    if (!data.is_array() || static_cast<long>(data.size()) != static_cast<long>(rows) * cols)
        throw InputError("json: matrix data must hold rows*cols entries");
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m(r, c) = complex_from_json(data[r * cols + c]);
    return m;
}

CVector vector_from_json(const json& j)
{
    if (!j.is_array())
        throw InputError("json: expected an array of complex numbers");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

Quiver quiver_from_json(const json& j)
{
    const int n = integer(field(j, "n"), "n");
    if (n < 1)
        throw InputError("json: quiver needs n >= 1");
    const json& a = field(j, "alpha");
    const json& b = field(j, "beta");
    if (!a.is_array() || !b.is_array() || a.size() != b.size())
        throw InputError("json: alpha and beta must be arrays of equal length");
    // accept the edge list with or without the leading empty edge out of V_0
    std::size_t skip;
    if (static_cast<int>(a.size()) == n - 1)
        skip = 0;
    else if (static_cast<int>(a.size()) == n)
        skip = 1;
    else
        throw InputError("json: quiver with n = " + std::to_string(n) + " needs " + std::to_string(n - 1) +
                         " edges");
    Quiver q = Quiver::zero(n);
    for (int k = 1; k < n; ++k) {
        q.alpha[k] = matrix_from_json(a[k - 1 + skip]);
        q.beta[k] = matrix_from_json(b[k - 1 + skip]);
    }
    q.validate();
    return q;
}

HypertoricQuiver hypertoric_from_json(const json& j)
{
    HypertoricQuiver hq;
    hq.n = integer(field(j, "n"), "n");
    const json& nu = field(j, "nu");
    const json& mu = field(j, "mu");
    if (!nu.is_array() || !mu.is_array())
        throw InputError("json: nu and mu must be arrays of levels");
    for (const auto& level : nu)
        hq.nu.push_back(vector_from_json(level));
    for (const auto& level : mu)
        hq.mu.push_back(vector_from_json(level));
    hq.validate();
    return hq;
}

SigmaSection section_from_json(const json& j)
{
    SigmaSection s;
    s.n = integer(field(j, "n"), "n");
    const json& rk = field(j, "rhoK");
    const json& rt = field(j, "rhoT");
    const json& rho = field(j, "rho");
    if (!rk.is_array() || rk.size() != 3 || !rt.is_array() || rt.size() != 3)
        throw InputError("json: rhoK and rhoT need three coefficients each");
    for (int k = 0; k < 3; ++k) {
        s.rhoK[k] = matrix_from_json(rk[k]);
        s.rhoT[k] = vector_from_json(rt[k]);
    }
    if (!rho.is_object())
        throw InputError("json: rho must be an object keyed by j");
    for (int jj = 1; jj < s.n; ++jj) {
        const std::string key = std::to_string(jj);
        if (!rho.contains(key))
            throw InputError("json: rho is missing component " + key);
        std::vector<CVector> coeffs;
        for (const auto& c : rho.at(key))
            coeffs.push_back(vector_from_json(c));
        s.rho.push_back(std::move(coeffs));
    }
    s.validate();
    return s;
}

StratumLabel label_from_json(const json& j)
{
    StratumLabel label;
    try {
        label.partition = field(j, "partition").get<SetPartition>();
        const json& orbits = field(j, "orbits");
        for (const auto& block : label.partition) {
            const std::string key = block_key(block);
            if (!orbits.contains(key))
                throw InputError("json: orbits is missing block " + key);
            label.orbits.push_back(orbits.at(key).get<std::vector<int>>());
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("json: bad stratum label: ") + e.what());
    }
    return label;
}

json parse(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("json: ") + e.what());
    }
}

json read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string dump(const json& j)
{
    return j.dump(2);
}

}  // namespace quiverhk::io
