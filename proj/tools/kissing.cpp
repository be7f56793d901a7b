#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kissing/parametrix.hpp"
#include "kissing/polynomial.hpp"
#include "kissing/quadrature.hpp"

using namespace kissing;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kPrecisionEnv = "KISSING_PRECISION";

struct Common {
    std::string out = ".";
    std::string precision;
    bool svg = false;
};

ordered_json cj(cd z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json provenance(const std::string& cmd, const ordered_json& config, const Common& c,
                        const ordered_json& tolerances = ordered_json::object())
{
    ordered_json p;
    p["toolkit"] = "kissing";
    p["version"] = kVersion;
    p["command"] = cmd;
    p["config"] = config;
    p["precision"] = c.precision;
    p["tolerances"] = tolerances;
    return p;
}

fs::path out_file(const Common& c, const std::string& name)
{
    fs::create_directories(c.out);
    return fs::path(c.out) / name;
}

void write_json(const Common& c, const std::string& name, const ordered_json& j)
{
    std::ofstream f(out_file(c, name));
    f << j.dump(2) << '\n';
    std::cout << (fs::path(c.out) / name).string() << '\n';
}

// CSV with a schema line; numbers at round-trip precision
class Csv {
public:
    Csv(const Common& c, const std::string& name, const std::string& kind, const std::string& header)
        : path_(out_file(c, name)), f_(path_)
    {
        f_ << "# schema_version=1 kind=" << kind << " toolkit=kissing " << kVersion << '\n' << header << '\n';
        f_ << std::setprecision(17);
        std::cout << path_.string() << '\n';
    }
    template <class... A>
    void row(const A&... a)
    {
        int i = 0;
        ((f_ << (i++ ? "," : "") << a), ...);
        f_ << '\n';
    }

private:
    fs::path path_;
    std::ofstream f_;
};

void write_svg_file(const Common& c, const std::string& name, const std::vector<SvgLayer>& layers, cd lo, cd hi,
                    const std::string& title)
{
    std::ofstream f(out_file(c, name));
    write_svg(f, layers, lo, hi, title);
    std::cout << (fs::path(c.out) / name).string() << '\n';
}

Precision precision_of(const Common& c) { return parse_precision(c.precision); }

void need(bool ok, const std::string& msg)
{
    if (!ok) throw ValidationError(msg);
}

double checked_lambda(double lambda)
{
    need(std::isfinite(lambda), "lambda must be finite");
    need(lambda > lambda_crit(), "lambda must exceed lambda_c = 1.32549...");
    return lambda;
}

cd parse_point(const std::string& s)
{
    const auto k = s.find(',');
    need(k != std::string::npos, "point '" + s + "' must be written re,im");
    try {
        return {std::stod(s.substr(0, k)), std::stod(s.substr(k + 1))};
    } catch (const std::exception&) {
        throw ValidationError("point '" + s + "' is not numeric");
    }
}

// ---- poly
struct PolyArgs {
    int n = 2;
    std::optional<double> omega, lambda;
};

void cmd_poly(const PolyArgs& a, const Common& c)
{
    need(a.n >= 0 && a.n <= 400, "n must lie in [0, 400]");
    need(a.omega.has_value() != a.lambda.has_value(), "give exactly one of --omega and --lambda");
    const double omega = a.omega ? *a.omega : a.n * *a.lambda;
    need(std::isfinite(omega), "omega must be finite");
    PolyOptions po;
    po.precision = precision_of(c);
    const ComplexPolynomial p = monic_op(a.n, omega, po);
    ordered_json config{{"n", a.n}, {"omega", omega}};
    if (a.lambda) config["lambda"] = *a.lambda;
    ordered_json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance("poly", config, c, {{"imaginary_zero_tol", 1e-8}});
    j["degree"] = p.degree;
    j["method"] = p.method;
    j["digits"] = p.digits;
    j["cond"] = p.cond;
    j["growth"] = p.growth;
    j["orthogonality_residual"] = orthogonality_residual(p);
    ordered_json co = ordered_json::array();
    for (cd v : p.coeffs) co.push_back(cj(v));
    j["coefficients"] = co;
    ZeroSet zs;
    if (p.degree > 0) zs = zeros_of(p);
    ordered_json zj = ordered_json::array();
    for (cd z : zs.zeros) zj.push_back(cj(z));
    j["zeros"] = zj;
    j["imaginary_zero"] = zs.imaginary_index >= 0 ? cj(zs.zeros[zs.imaginary_index]) : ordered_json(nullptr);
    const std::string stem = "poly_n" + std::to_string(a.n);
    write_json(c, stem + ".json", j);
    Csv csv(c, stem + "_zeros.csv", "zeros", "re,im,imaginary");
    for (std::size_t k = 0; k < zs.zeros.size(); ++k)
        csv.row(zs.zeros[k].real(), zs.zeros[k].imag(), int(k) == zs.imaginary_index ? 1 : 0);
    if (c.svg) {
        std::vector<SvgLayer> layers{{{}, zs.zeros, "#c00"}};
        if (a.lambda && *a.lambda > lambda_crit()) {
            const CriticalGraph g = build_critical_graph(solve_boutroux(*a.lambda));
            layers.insert(layers.begin(), {{g.gamma1.points, g.gamma2.points}, {}, "#888"});
        }
        std::ostringstream t;
        t << "zeros of p_" << a.n << ", omega = " << omega;
        write_svg_file(c, stem + ".svg", layers, cd(-1.2, -1.2), cd(1.2, 1.2), t.str());
    }
}

// ---- boutroux
void cmd_boutroux(double lambda, const Common& c)
{
    checked_lambda(lambda);
    const SpectralCurve s = solve_boutroux(lambda);
    const SegmentIntegrals si = segment_integrals(lambda, s.x_star);
    ordered_json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance("boutroux", {{"lambda", lambda}}, c, {{"x_star_root", 1e-15}});
    j["lambda_c"] = lambda_crit();
    j["x_star"] = s.x_star;
    j["z_star"] = cj(s.z_star);
    j["kappa"] = s.kappa;
    j["psi_residual"] = psi(s.x_star, lambda);
    j["half_mass_integral"] = cj(si.right);
    j["half_mass_residual"] = std::abs(si.right - cd(0, M_PI / 2));
    write_json(c, "boutroux.json", j);
}

// ---- graph
void cmd_graph(double lambda, int zeros_n, const Common& c)
{
    checked_lambda(lambda);
    need(zeros_n >= 0 && zeros_n <= 200, "--zeros must lie in [0, 200]");
    const CriticalGraph g = build_critical_graph(solve_boutroux(lambda));
    auto arc_json = [](const TrajectoryArc& a) {
        ordered_json j;
        j["start"] = to_string(a.start_kind);
        j["end"] = to_string(a.end_kind);
        j["endpoint"] = cj(a.points.back());
        j["vertices"] = a.points.size();
        j["length"] = a.length();
        j["max_real_residual"] = a.max_real_residual();
        if (a.end_kind == EndKind::PolePlus) j["capture_distance"] = a.end_distance;
        if (a.end_kind == EndKind::Escape) j["escape_radius"] = a.escape_radius;
        for (cd p : a.points)
            if (p.real() == 0 && a.end_kind == EndKind::ZeroStarMirror) j["axis_crossing"] = cj(p);
        return j;
    };
    ordered_json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance("graph", {{"lambda", lambda}, {"zeros", zeros_n}}, c,
                                   {{"step_tol", TraceOptions{}.tol},
                                    {"max_step", TraceOptions{}.max_step},
                                    {"capture_radius", TraceOptions{}.capture_radius},
                                    {"escape_radius", TraceOptions{}.escape_radius}});
    j["gamma2"] = arc_json(g.gamma2);
    j["gamma1"] = arc_json(g.gamma1);
    j["connecting"] = arc_json(g.gamma_hat_traj);
    j["escape"] = arc_json(g.escape);
    j["mu_mass_gamma2"] = g.mu_mass_gamma2;
    std::vector<cd> zeros;
    if (zeros_n > 0) {
        PolyOptions po;
        po.precision = precision_of(c);
        zeros = zeros_of(monic_op(zeros_n, zeros_n * lambda, po)).zeros;
        const ZeroDistanceStats st = zero_distance_stats(zeros, g);
        j["zeros"] = {{"n", zeros_n},
                      {"max_distance", st.max},
                      {"mean_distance", st.mean},
                      {"counted", st.counted},
                      {"outlier", st.outlier ? cj(*st.outlier) : ordered_json(nullptr)},
                      {"kolmogorov_distance", kolmogorov_distance(zeros, g)}};
    }
    write_json(c, "graph.json", j);
    for (auto [name, arc] : {std::pair{"gamma2", &g.gamma2}, {"gamma1", &g.gamma1},
                             {"connecting", &g.gamma_hat_traj}, {"escape", &g.escape}}) {
        std::ofstream f(out_file(c, std::string("arc_") + name + ".csv"));
        write_arc_csv(f, *arc);
        std::cout << (fs::path(c.out) / (std::string("arc_") + name + ".csv")).string() << '\n';
    }
    if (c.svg) {
        Polyline esc;
        for (cd p : g.escape.points)
            if (std::abs(p) < 3) esc.push_back(p);
        std::vector<SvgLayer> layers{{{g.gamma1.points, g.gamma2.points}, {}, "#1f4e9c"},
                                     {{g.gamma_hat_traj.points, esc}, {}, "#999"},
                                     {{}, {cd(-1, 0), cd(1, 0), g.curve.z_star, -std::conj(g.curve.z_star)}, "#000"}};
        if (!zeros.empty()) layers.push_back({{}, zeros, "#c00"});
        std::ostringstream t;
        t << "critical graph, lambda = " << lambda;
        write_svg_file(c, "graph.svg", layers, cd(-2, -1), cd(2, 2), t.str());
    }
}

ordered_json solution_json(const PeriodSolution& ps)
{
    ordered_json j;
    j["k"] = ps.k;
    j["n_parity"] = ps.n_parity ? "odd" : "even";
    j["kappa_multiple"] = ps.kappa_multiple;
    j["parity_nu"] = ps.periods.parity_nu;
    j["parity_sigma"] = ps.periods.parity_sigma;
    j["mA0"] = cj(ps.periods.mA0);
    j["mA1"] = cj(ps.periods.mA1);
    j["mB0"] = cj(ps.periods.mB0);
    j["mB1"] = cj(ps.periods.mB1);
    j["c"] = ps.periods.c_const;
    j["a_star"] = cj(ps.a_star);
    j["b_star"] = ps.b_star;
    j["theta_proximity"] = ps.theta_proximity;
    j["residual_A"] = ps.residual_A;
    j["residual_B"] = ps.residual_B;
    return j;
}

// ---- periods
void cmd_periods(double lambda, const Common& c)
{
    checked_lambda(lambda);
    const PeriodContext ctx(solve_boutroux(lambda));
    ordered_json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance("periods", {{"lambda", lambda}}, c, {{"theta_tolerance", SolveOptions{}.theta_tolerance}, {"tau_tol", SolveOptions{}.tau_tol}});
    j["y_star"] = cj(ctx.y_star());
    ordered_json sols = ordered_json::array();
    for (int np : {0, 1})
        for (int k : {1, 2}) sols.push_back(solution_json(solve_periods(ctx, np, k)));
    j["solutions"] = sols;
    j["two_kappa_minus_c_odd"] = two_kappa_minus_c(lambda);
    write_json(c, "periods.json", j);
}

// ---- asymptotics
void cmd_asymptotics(double lambda, const std::vector<int>& ns, const std::vector<std::string>& pts, const Common& c)
{
    checked_lambda(lambda);
    need(!ns.empty(), "give at least one --n");
    for (int n : ns) need(n >= 1 && n <= 200, "n must lie in [1, 200]");
    std::vector<cd> zs;
    for (const auto& s : pts) zs.push_back(parse_point(s));
    if (zs.empty()) zs = {cd(2, 2), cd(0, 3), cd(-2, 1), cd(1, -2)};
    const ParametrixEval pe = ParametrixEval::build(lambda);
    PolyOptions po;
    po.precision = precision_of(c);
    ordered_json j;
    j["schema_version"] = 1;
    ordered_json cfg{{"lambda", lambda}, {"n", ns}};
    ordered_json pj = ordered_json::array();
    for (cd z : zs) pj.push_back(cj(z));
    cfg["z"] = pj;
    j["provenance"] = provenance("asymptotics", cfg, c, {{"theta_tolerance", SolveOptions{}.theta_tolerance}, {"tau_tol", SolveOptions{}.tau_tol}});
    ordered_json rows = ordered_json::array();
    Csv csv(c, "asymptotics.csv", "asymptotics", "n,z_re,z_im,approx_re,approx_im,exact_re,exact_im,rel_error");
    for (int n : ns) {
        const PeriodSolution ps = solve_for_degree(pe, n, 1);
        const ComplexPolynomial p = monic_op(n, n * lambda, po);
        ordered_json r;
        r["n"] = n;
        r["solution"] = solution_json(ps);
        ordered_json vals = ordered_json::array();
        for (cd z : zs) {
            const cd a = strong_asymptotic(n, z, pe, ps), e = p(z);
            const double err = std::abs(a / e - 1.0);
            vals.push_back({{"z", cj(z)}, {"approx", cj(a)}, {"exact", cj(e)}, {"rel_error", err}});
            csv.row(n, z.real(), z.imag(), a.real(), a.imag(), e.real(), e.imag(), err);
        }
        r["values"] = vals;
        if (n % 2 == 1) {
            const ZeroSet zset = zeros_of(p);
            r["imaginary_zero"] = zset.imaginary_index >= 0 ? cj(zset.zeros[zset.imaginary_index]) : ordered_json(nullptr);
        }
        rows.push_back(r);
    }
    j["results"] = rows;
    write_json(c, "asymptotics.json", j);
}

// ---- quadrature
void cmd_quadrature(int n_half, double lo, double hi, int count, const std::string& fn, const Common& c)
{
    need(n_half >= 1 && n_half <= 20, "n-half must lie in [1, 20]");
    need(lo > 0 && hi > lo && std::isfinite(hi), "need 0 < omega-from < omega-to");
    need(count >= 2 && count <= 1000, "count must lie in [2, 1000]");
    Integrand f;
    if (fn == "exp")
        f = [](cd z) { return std::exp(z); };
    else if (fn == "pole")
        f = [](cd z) { return 1.0 / (z - 3.0); };
    else
        throw ValidationError("unknown function '" + fn + "' (expected exp or pole)");
    const auto grid = log_grid(lo, hi, count);
    const OrderFit fit = order_fit(n_half, f, grid);
    const OrderFit ctl = legendre_order_fit(n_half, f, grid);
    ordered_json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance(
        "quadrature",
        {{"n_half", n_half}, {"omega_from", lo}, {"omega_to", hi}, {"count", count}, {"function", fn}}, c,
        {{"oracle_rel_tol", 1e-15}, {"skip_condition", 1e8}});
    j["slope"] = fit.slope;
    j["expected_slope"] = -(2 * n_half + 1);
    j["legendre_control_slope"] = ctl.slope;
    j["skipped"] = fit.skipped;
    write_json(c, "quadrature.json", j);
    Csv csv(c, "quadrature.csv", "quadrature_order", "omega,abs_error,fitted_slope");
    for (const auto& p : fit.points) csv.row(p.omega, p.abs_error, fit.slope);
    std::ofstream rf(out_file(c, "rule.json"));
    write_rule_json(rf, build_rule(n_half, lo));
    std::cout << (fs::path(c.out) / "rule.json").string() << '\n';
}

// ---- theta-scan
void cmd_theta(double lo, double hi, int steps, const Common& c)
{
    checked_lambda(lo);
    need(hi > lo && std::isfinite(hi), "need --from < --to");
    need(steps >= 2 && steps <= 100000, "steps must lie in [2, 100000]");
    const ThetaScan s = theta_star_scan(lo, hi, steps);
    ordered_json j;
    j["schema_version"] = 1;
    j["provenance"] = provenance("theta-scan", {{"from", lo}, {"to", hi}, {"steps", steps}}, c);
    j["crossings"] = s.crossings;
    j["max_jump"] = s.max_jump;
    write_json(c, "theta_scan.json", j);
    Csv csv(c, "theta_scan.csv", "theta_scan", "lambda,two_kappa_minus_c,mod_2pi");
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        double m = std::fmod(s.lifted[i], 2 * M_PI);
        if (m < 0) m += 2 * M_PI;
        csv.row(s.lambda[i], s.lifted[i], m);
    }
}

int report(const std::string& kind, const std::string& msg, int code, double diag = 0)
{
    ordered_json e;
    e["schema_version"] = 1;
    e["error"] = {{"kind", kind}, {"message", msg}, {"exit_code", code}};
    if (diag != 0) e["error"]["diagnostic"] = diag;
    std::cerr << e.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kissing polynomials: supercritical asymptotics and oscillatory quadrature"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Common c;
    const char* env = std::getenv(kPrecisionEnv);
    c.precision = env ? env : "auto";
    app.add_option("--out", c.out, "output directory")->capture_default_str();
    app.add_option("--precision", c.precision, "double, extended or auto (default from KISSING_PRECISION)")
        ->capture_default_str();

    PolyArgs pa;
    auto* poly = app.add_subcommand("poly", "monic kissing polynomial, zeros and conditioning");
    poly->add_option("--n", pa.n, "degree")->required();
    poly->add_option("--omega", pa.omega, "frequency");
    poly->add_option("--lambda", pa.lambda, "rate, omega = n lambda");
    poly->add_flag("--svg", c.svg, "zero plot");

    double lambda = 3;
    auto* bout = app.add_subcommand("boutroux", "x_*, kappa and residuals");
    bout->add_option("--lambda", lambda)->required();

    int zeros_n = 0;
    auto* graph = app.add_subcommand("graph", "critical trajectories");
    graph->add_option("--lambda", lambda)->required();
    graph->add_option("--zeros", zeros_n, "overlay zeros of p_n");
    graph->add_flag("--svg", c.svg, "graph plot");

    auto* per = app.add_subcommand("periods", "period data for both parities");
    per->add_option("--lambda", lambda)->required();

    std::vector<int> ns;
    std::vector<std::string> pts;
    auto* asy = app.add_subcommand("asymptotics", "strong asymptotics against exact polynomials");
    asy->add_option("--lambda", lambda)->required();
    asy->add_option("--n", ns, "degrees")->required();
    asy->add_option("--z", pts, "points re,im");

    int n_half = 1, count = 12;
    double wlo = 20, whi = 200;
    std::string fn = "exp";
    auto* quad = app.add_subcommand("quadrature", "rule error against omega");
    quad->add_option("--n-half", n_half)->required();
    quad->add_option("--omega-from", wlo)->capture_default_str();
    quad->add_option("--omega-to", whi)->capture_default_str();
    quad->add_option("--count", count)->capture_default_str();
    quad->add_option("--function", fn, "exp or pole")->capture_default_str();

    double tlo = 2, thi = 10;
    int steps = 400;
    auto* theta = app.add_subcommand("theta-scan", "2 kappa - c over a lambda range");
    theta->add_option("--from", tlo)->capture_default_str();
    theta->add_option("--to", thi)->capture_default_str();
    theta->add_option("--steps", steps)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("validation", e.what(), 2);
    }

    try {
        parse_precision(c.precision);
        if (*poly) cmd_poly(pa, c);
        if (*bout) cmd_boutroux(lambda, c);
        if (*graph) cmd_graph(lambda, zeros_n, c);
        if (*per) cmd_periods(lambda, c);
        if (*asy) cmd_asymptotics(lambda, ns, pts, c);
        if (*quad) cmd_quadrature(n_half, wlo, whi, count, fn, c);
        if (*theta) cmd_theta(tlo, thi, steps, c);
    } catch (const ValidationError& e) {
        return report("validation", e.what(), 2);
    } catch (const ThetaStarError& e) {
        return report("theta_star", e.what(), 4, e.diagnostic());
    } catch (const NumericalError& e) {
        return report("numerical", e.what(), 3, e.diagnostic());
    } catch (const std::exception& e) {
        return report("numerical", e.what(), 3);
    }
    return 0;
}
