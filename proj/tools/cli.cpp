#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "quiverhk/io.hpp"

namespace quiverhk::cli {

namespace {

using io::json;

double resolve_tol(const CLI::Option* flag, double value, double fallback)
{
    if (flag && flag->count() > 0) {
        if (!(value > 0))
            throw InputError("--tol must be positive");
        return value;
    }
    if (const char* env = std::getenv("QUIVERHK_TOL")) {
        char* end = nullptr;
        const double t = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(t > 0))
            throw InputError(std::string("QUIVERHK_TOL is not a positive number: ") + env);
        return t;
    }
    return fallback;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("cannot parse number \"" + item + "\"");
        }
    }
    return out;
}

// Round every number in the tree to a multiple of q, so that printed output is stable
// under perturbations well below q.
void quantize(json& j, double q)
{
    if (j.is_number_float()) {
        double r = std::round(j.get<double>() / q) * q;
        if (r == 0.0)
            r = 0.0;
        j = r;
    } else if (j.is_structured()) {
        for (auto& child : j)
            quantize(child, q);
    }
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw InputError("cannot write " + path);
    f.precision(17);
    return f;
}

// ---------------------------------------------------------------------------
// phi

struct PhiArgs {
    std::string in;
    std::string method;
    std::string convention = "printed";
    double tol = 1e-8;
    CLI::Option* tol_flag = nullptr;
};

int cmd_phi(const PhiArgs& a, std::ostream& out)
{
    const json doc = io::read_file(a.in);
    CMatrix x;
    std::string method = "balancer";
    if (doc.is_object() && doc.contains("matrix")) {
        x = io::matrix_from_json(doc.at("matrix"));
        if (doc.contains("method"))
            method = doc.at("method").get<std::string>();
    } else {
        x = io::matrix_from_json(doc);
    }
    if (!a.method.empty())
        method = a.method;
    PhiOptions opts;
    opts.tol = resolve_tol(a.tol_flag, a.tol, opts.tol);
    if (a.convention == "moment")
        opts.convention = BConvention::MomentConsistent;
    else if (a.convention != "printed")
        throw InputError("unknown convention \"" + a.convention + "\" (printed|moment)");
    const PhiResult r = phi_n_detailed(x, parse_phi_method(method), opts);
    out << io::dump(io::to_json(r)) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// balance

struct BalanceArgs {
    std::string in;
    std::string group = "unitary";
    std::string lambda_r;
    std::string trace_csv;
    int max_iter = 50000;
    double tol = 1e-9;
    CLI::Option* tol_flag = nullptr;
};

json report_json(const BalanceReport& r)
{
    return json{{"quiver", io::to_json(r.quiver)},
                {"residual", r.residual},
                {"iterations", r.iterations},
                {"converged", r.converged}};
}

void write_trace(const std::string& path, const BalanceReport& r)
{
    if (path.empty())
        return;
    auto f = open_out(path);
    f << "iter,energy,residual,step\n";
    for (const auto& row : r.trace)
        f << row.iter << "," << row.energy << "," << row.residual << "," << row.step << "\n";
}

int cmd_balance(const BalanceArgs& a, std::ostream& out, std::ostream& err)
{
    const Quiver q = io::quiver_from_json(io::read_file(a.in));
    BalanceParams params;
    params.tol = resolve_tol(a.tol_flag, a.tol, params.tol);
    params.max_iter = a.max_iter;
    if (a.group == "special")
        params.group = GaugeGroup::Special;
    else if (a.group == "unitary")
        params.group = GaugeGroup::Unitary;
    else
        throw InputError("unknown group \"" + a.group + "\" (special|unitary)");
    MomentScalars target = infer_scalars(q).scalars;
    target.lambda_r.setZero();
    if (!a.lambda_r.empty()) {
        const auto values = parse_list(a.lambda_r);
        if (static_cast<int>(values.size()) != q.n - 1)
            throw InputError("--lambda-r needs " + std::to_string(q.n - 1) + " values");
        for (int i = 0; i < q.n - 1; ++i)
            target.lambda_r(i) = values[i];
    }
    try {
        const BalanceReport r = balance(q, target, params);
        write_trace(a.trace_csv, r);
        out << io::dump(report_json(r)) << "\n";
        return 0;
    } catch (const MaxIterExceeded& e) {
        write_trace(a.trace_csv, e.report);
        out << io::dump(report_json(e.report)) << "\n";
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// ---------------------------------------------------------------------------
// sigma

struct SigmaArgs {
    std::string in;
    bool closed_form = false;
    int grid = 0;
    std::string csv;
    double quantum = 0.0;
};

void write_grid(const std::string& path, const SigmaSection& s, int m)
{
    auto f = open_out(path);
    f << "a,b,u_re,u_im,v_re,v_im,component,index,re,im\n";
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            const double theta = M_PI * (a + 0.5) / m;
            const double phi = 2.0 * M_PI * b / m;
            const cplx u(std::cos(theta / 2), 0.0);
            const cplx v = std::polar(std::sin(theta / 2), phi);
            const SectionValue val = evaluate_section(s, u, v);
            auto row = [&](const std::string& comp, Eigen::Index idx, cplx z) {
                f << a << "," << b << "," << u.real() << "," << u.imag() << "," << v.real() << "," << v.imag()
                  << "," << comp << "," << idx << "," << z.real() << "," << z.imag() << "\n";
            };
            for (Eigen::Index r = 0; r < val.K.rows(); ++r)
                for (Eigen::Index c = 0; c < val.K.cols(); ++c)
                    row("K", r * val.K.cols() + c, val.K(r, c));
            for (Eigen::Index i = 0; i < val.T.size(); ++i)
                row("T", i, val.T(i));
            for (std::size_t j = 0; j < val.rho.size(); ++j)
                for (Eigen::Index i = 0; i < val.rho[j].size(); ++i)
                    row("rho" + std::to_string(j + 1), i, val.rho[j](i));
        }
}

int cmd_sigma(const SigmaArgs& a, std::ostream& out)
{
    const json doc = io::read_file(a.in);
    const bool hypertoric_input = doc.is_object() && doc.contains("nu");
    if (a.closed_form && !hypertoric_input)
        throw InputError("--closed-form needs hypertoric input ({\"n\", \"nu\", \"mu\"})");
    if (a.grid < 0)
        throw InputError("--grid must be non-negative");
    if (a.grid > 0 && a.csv.empty())
        throw InputError("--grid needs --csv FILE");
    SigmaSection s;
    if (hypertoric_input) {
        const HypertoricQuiver hq = io::hypertoric_from_json(doc);
        s = a.closed_form ? hypertoric_sigma(hq) : sigma(hypertoric_build(hq));
    } else {
        s = sigma(io::quiver_from_json(doc));
    }
    json j = io::to_json(s);
    if (a.quantum > 0)
        quantize(j, a.quantum);
    out << io::dump(j) << "\n";
    if (a.grid > 0)
        write_grid(a.csv, s, a.grid);
    return 0;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
    std::string in;
    double tol = 1e-8;
    CLI::Option* tol_flag = nullptr;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out)
{
    const Quiver q = io::quiver_from_json(io::read_file(a.in));
    const Classification c = classify(q, resolve_tol(a.tol_flag, a.tol, 1e-8));
    out << io::dump(io::to_json(c)) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// hypertoric

struct HypertoricArgs {
    std::string in;
    int n = 3;
    std::uint64_t seed = 1;
};

int cmd_hypertoric(const HypertoricArgs& a, std::ostream& out)
{
    HypertoricQuiver hq;
    if (!a.in.empty()) {
        hq = io::hypertoric_from_json(io::read_file(a.in));
    } else {
        if (a.n < 2)
            throw InputError("--n must be at least 2");
        Rng rng(a.seed);
        CVector lc(a.n - 1);
        Eigen::VectorXd lr(a.n - 1);
        for (int i = 0; i < a.n - 1; ++i) {
            lc(i) = random_complex_scalar(rng);
            lr(i) = random_uniform(rng, -1.0, 1.0);
        }
        hq = balanced_hypertoric(a.n, lc, lr, a.seed);
    }
    const MomentScalars s = hypertoric_scalars(hq);
    json lr = json::array();
    for (int i = 0; i < s.nodes(); ++i)
        lr.push_back(s.lambda_r(i));
    out << io::dump(json{{"hypertoric", io::to_json(hq)},
                         {"quiver", io::to_json(hypertoric_build(hq))},
                         {"stable", hk_stable(hq)},
                         {"lambda_c", io::vector_to_json(s.lambda_c)},
                         {"lambda_r", lr}})
        << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    std::string suite;
    int n = 3;
    int trials = 10;
    std::uint64_t seed = 1;
    double tol = 0.0;
    CLI::Option* tol_flag = nullptr;
};

struct Recorder {
    double tol_override = 0.0;
    std::map<std::string, double> max_residual;
    json failures = json::array();
    std::uint64_t seed = 0;

    void check(const std::string& name, double value, double default_tol)
    {
        const double tol = tol_override > 0 ? tol_override : default_tol;
        auto& m = max_residual[name];
        m = std::max(m, value);
        if (!(value <= tol))
            failures.push_back(json{{"seed", seed}, {"check", name}, {"magnitude", value}});
    }
};

CVector random_levels(int n, Rng& rng)
{
    CVector lc(n - 1);
    for (int i = 0; i < n - 1; ++i)
        lc(i) = random_complex_scalar(rng);
    return lc;
}

Quiver trial_quiver(int n, std::uint64_t s)
{
    if (s == 0)
        return Quiver::zero(n);
    Rng rng(s);
    return random_complex_solution(n, random_levels(n, rng), s);
}

HypertoricQuiver trial_hypertoric(int n, std::uint64_t s)
{
    if (s == 0)
        return HypertoricQuiver::zero(n);
    Rng rng(s);
    const CVector lc = random_levels(n, rng);
    Eigen::VectorXd lr(n - 1);
    for (int i = 0; i < n - 1; ++i)
        lr(i) = random_uniform(rng, -1.0, 1.0);
    return balanced_hypertoric(n, lc, lr, s);
}

double section_scale(const SectionValue& v)
{
    double s = v.K.norm() + v.T.norm();
    for (const auto& r : v.rho)
        s += r.norm();
    return 1.0 + s;
}

// Greedy nearest matching of two spectra; returns the largest matched distance.
double spectrum_distance(const CVector& a, const CVector& b)
{
    std::vector<cplx> pool(b.data(), b.data() + b.size());
    double worst = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < pool.size(); ++k)
            if (std::abs(pool[k] - a(i)) < std::abs(pool[best] - a(i)))
                best = k;
        worst = std::max(worst, std::abs(pool[best] - a(i)));
        pool.erase(pool.begin() + static_cast<long>(best));
    }
    return worst;
}

bool rotation_stable(const HypertoricQuiver& hq)
{
    const Quiver q = hypertoric_build(hq);
    for (const auto& [u, v] : rotation_sample()) {
        const Quiver r = su2_act(q, u, v);
        bool ok = true;
        for (int k = 1; k < q.n && ok; ++k) {
            const double scale = 1.0 + r.alpha[k].norm() + r.beta[k].norm();
            ok = numeric_rank(r.alpha[k], 1e-10 * scale) == k && numeric_rank(r.beta[k], 1e-10 * scale) == k;
        }
        if (ok)
            return true;
    }
    return false;
}

void run_trial(const std::string& suite, int n, std::uint64_t s, Recorder& rec)
{
    if (suite == "characteristic" || suite == "xk" || suite == "lemma59") {
        const Quiver q = trial_quiver(n, s);
        const MomentScalars sc = infer_scalars(q).scalars;
        rec.check("complex_residual", complex_residual(q, sc), 1e-10);
        if (suite == "characteristic")
            rec.check("characteristic", characteristic_residual(q, sc), 1e-8);
        else if (suite == "xk")
            rec.check("xk_recursion", xk_recursion_residual(q, sc), 1e-8);
        else
            for (int k = 1; k < n; ++k)
                rec.check("lemma59_k" + std::to_string(k), lemma59_residual(q, k), 1e-8);
    } else if (suite == "equivariance") {
        const Quiver q = trial_quiver(n, s);
        const SigmaSection base = sigma(q);
        Rng rng(s ^ 0x9e3779b97f4a7c15ULL);
        const auto [u1, v1] = random_su2(rng);
        const SigmaSection moved = sigma(su2_act(q, u1, v1));
        double worst = 0;
        for (const auto& [u, v] : unit_samples(16, s)) {
            const SectionValue lhs = evaluate_section(moved, u, v);
            const SectionValue rhs = evaluate_section(base, u * u1 - v * std::conj(v1), u * v1 + v * std::conj(u1));
            worst = std::max(worst, value_distance(lhs, rhs) / section_scale(rhs));
        }
        rec.check("sigma_substitution", worst, 1e-9);
    } else if (suite == "reality") {
        const SigmaSection sec = sigma(trial_quiver(n, s));
        double scale = 1.0;
        for (int k = 0; k < 3; ++k)
            scale = std::max(scale, sec.rhoK[k].norm() + sec.rhoT[k].norm());
        rec.check("reality", reality_residual(sec) / scale, 1e-10);
    } else if (suite == "kappa") {
        const HypertoricQuiver hq = trial_hypertoric(n, s);
        const Quiver q = hypertoric_build(hq);
        const MomentScalars sc = infer_scalars(q).scalars;
        const CVector eig = Eigen::ComplexEigenSolver<CMatrix>(trace_free(top_product(q))).eigenvalues();
        rec.check("kappa_spectrum", spectrum_distance(eig, kappa_spectrum(sc, n)), 1e-6);
    } else if (suite == "stability") {
        HypertoricQuiver hq = trial_hypertoric(n, s);
        if (s != 0) {
            Rng rng(s + 17);
            for (int k = 1; k < n; ++k)
                for (int i = 0; i < k; ++i) {
                    const double r = random_uniform(rng, 0.0, 1.0);
                    if (r < 0.15)
                        hq.nu[k - 1](i) = 0;
                    else if (r < 0.3)
                        hq.mu[k - 1](i) = 0;
                    else if (r < 0.4)
                        hq.nu[k - 1](i) = hq.mu[k - 1](i) = 0;
                }
        }
        rec.check("stability_mismatch", hk_stable(hq) == rotation_stable(hq) ? 0.0 : 1.0, 0.5);
    }
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err)
{
    if (a.n < 2 || a.n > 8)
        throw InputError("--n must lie in 2..8");
    if (a.trials < 1)
        throw InputError("--trials must be positive");
    Recorder rec;
    rec.tol_override = resolve_tol(a.tol_flag, a.tol, 0.0);
    static const std::vector<std::string> suites{"characteristic", "xk",    "lemma59",  "equivariance",
                                                 "reality",        "kappa", "stability"};
    if (std::find(suites.begin(), suites.end(), a.suite) == suites.end())
        throw InputError("unknown suite \"" + a.suite +
                         "\" (characteristic|xk|lemma59|equivariance|reality|kappa|stability)");
    for (int t = 0; t < a.trials; ++t) {
        rec.seed = a.seed + static_cast<std::uint64_t>(t);
        try {
            run_trial(a.suite, a.n, rec.seed, rec);
        } catch (const SolverError& e) {
            rec.failures.push_back(json{{"seed", rec.seed}, {"check", "solver"}, {"magnitude", nullptr},
                                        {"message", e.what()}});
        }
    }
    json maxr = json::object();
    for (const auto& [k, v] : rec.max_residual)
        maxr[k] = v;
    out << io::dump(json{{"suite", a.suite},
                         {"n", a.n},
                         {"trials", a.trials},
                         {"seed", a.seed},
                         {"failures", rec.failures},
                         {"max_residuals", maxr}})
        << "\n";
    for (const auto& f : rec.failures)
        err << "FAIL seed=" << f["seed"] << " check=" << f["check"].get<std::string>()
            << " magnitude=" << f["magnitude"] << "\n";
    return rec.failures.empty() ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    out.precision(17);
    CLI::App app{"quiverhk: hyperkähler quiver varieties, twistor sections and strata"};
    app.require_subcommand(1);

    PhiArgs phi;
    auto* sp = app.add_subcommand("phi", "Phi_n of a nilpotent matrix");
    sp->add_option("--in", phi.in, "matrix JSON, or {\"matrix\", \"method\"}")->required();
    sp->add_option("--method", phi.method, "closed2 | closed3 | recursive | balancer");
    sp->add_option("--convention", phi.convention, "printed | moment (recursive method)");
    phi.tol_flag = sp->add_option("--tol", phi.tol, "nilpotency tolerance");

    BalanceArgs bal;
    auto* sb = app.add_subcommand("balance", "Kempf-Ness balancing of a quiver");
    sb->add_option("--in", bal.in, "quiver JSON")->required();
    sb->add_option("--group", bal.group, "special | unitary");
    sb->add_option("--lambda-r", bal.lambda_r, "comma separated real levels (unitary group)");
    sb->add_option("--trace-csv", bal.trace_csv, "write the iteration trace here");
    sb->add_option("--max-iter", bal.max_iter, "iteration limit");
    bal.tol_flag = sb->add_option("--tol", bal.tol, "residual tolerance");

    SigmaArgs sig;
    auto* ss = app.add_subcommand("sigma", "twistor section of a quiver");
    ss->add_option("--in", sig.in, "quiver or hypertoric JSON")->required();
    ss->add_flag("--closed-form", sig.closed_form, "use the hypertoric closed form");
    ss->add_option("--grid", sig.grid, "evaluate on an m x m (u,v) grid");
    ss->add_option("--csv", sig.csv, "CSV file for the grid evaluations");
    ss->add_option("--quantum", sig.quantum, "round printed coefficients to this step");

    ClassifyArgs cls;
    auto* sc = app.add_subcommand("classify", "stratum label of a quiver");
    sc->add_option("--in", cls.in, "quiver JSON")->required();
    cls.tol_flag = sc->add_option("--tol", cls.tol, "relative tolerance");

    VerifyArgs ver;
    auto* sv = app.add_subcommand("verify", "seeded identity checks");
    sv->add_option("--suite", ver.suite, "characteristic | xk | lemma59 | equivariance | reality | kappa | stability")
        ->required();
    sv->add_option("--n", ver.n, "flag length");
    sv->add_option("--trials", ver.trials, "number of trials");
    sv->add_option("--seed", ver.seed, "first seed; trial t uses seed + t");
    ver.tol_flag = sv->add_option("--tol", ver.tol, "override every suite threshold");

    HypertoricArgs hyp;
    auto* sh = app.add_subcommand("hypertoric", "build a bidiagonal quiver");
    sh->add_option("--in", hyp.in, "hypertoric JSON; omit to draw balanced data");
    sh->add_option("--n", hyp.n, "flag length for drawn data");
    sh->add_option("--seed", hyp.seed, "seed for drawn data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sp)
            return cmd_phi(phi, out);
        if (*sb)
            return cmd_balance(bal, out, err);
        if (*ss)
            return cmd_sigma(sig, out);
        if (*sc)
            return cmd_classify(cls, out);
        if (*sv)
            return cmd_verify(ver, out, err);
        if (*sh)
            return cmd_hypertoric(hyp, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const io::json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace quiverhk::cli
