#include "kissing/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kissing {

namespace {

const cd I(0, 1);

IntegrationOptions period_options()
{
    IntegrationOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    opt.max_panels = 20000;
    return opt;
}

// xi (z^2 - 1) at z = base + off, sheet 1
cd xi_p(const SpectralCurve& c, cd base, cd off)
{
    return c.sqrt_q_at(base, off) * (((base - 1.0) + off) * ((base + 1.0) + off));
}

// Integral of f(base, off) along a polyline; declared-singular ends are integrated in the offset variable.
template <class F>
cd integrate_route(F&& f, const Polyline& r, bool sing_start, bool sing_end)
{
    const auto opt = period_options();
    auto from = [&f](cd base) { return [&f, base](cd off) { return f(base, off); }; };
    cd total = 0;
    const std::size_t ns = r.size() - 1;
    for (std::size_t i = 0; i < ns; ++i) {
        const cd a = r[i], b = r[i + 1];
        const bool sa = sing_start && i == 0, sb = sing_end && i + 1 == ns;
        if (sa && sb) {
            const cd m = (a + b) / 2.0;
            total += integrate_contour<double>(from(a), Path<double>::segment(0, m - a), opt, {true, false});
            total += integrate_contour<double>(from(b), Path<double>::segment(m - b, 0), opt, {false, true});
        } else if (sb) {
            total += integrate_contour<double>(from(b), Path<double>::segment(a - b, 0), opt, {false, true});
        } else {
            total += integrate_contour<double>(from(a), Path<double>::segment(0, b - a), opt, {sa, false});
        }
    }
    return total;
}

double wrap_to(double v, double period)
{
    return v - period * std::round(v / period);
}

// distance of a period value to target + 2 pi i Z
double residual_mod(cd v, cd target)
{
    const cd d = v - target;
    return std::abs(cd(d.real(), wrap_to(d.imag(), 2 * M_PI)));
}

Polyline disc(cd c, double r)
{
    Polyline v;
    for (int k = 0; k < 16; ++k) v.push_back(c + std::polar(r, 2 * M_PI * (k + 0.5) / 16));
    return v;
}

struct OmegaIntegrand {
    const SpectralCurve* c;
    cd a, y, beta_a, beta_y;
    double b;
    int sheet;
    double n_xi = 0;  // subtracts n xi (sheet 1)

    cd operator()(cd base, cd off) const
    {
        const cd z = base + off;
        const cd sq = c->sqrt_q_at(base, off);
        cd w = sq * (((base - 1.0) + off) * ((base + 1.0) + off));
        if (sheet == 2) w = -w;
        cd v = 0.5 * (a - y) / ((z - a) * (z - y)) + (0.5 * beta_a / (z - a) - 0.5 * beta_y / (z - y) + b) / w;
        if (n_xi != 0) v -= n_xi * sq;
        return v;
    }
};

OmegaIntegrand omega_of(const PeriodSolution& ps, const PeriodContext& ctx, int sheet)
{
    const int nu = ps.periods.parity_nu, sg = ps.periods.parity_sigma;
    return {&ctx.curve(), ps.a_star, ctx.y_star(), ctx.beta(ps.a_star, nu), ctx.beta(ctx.y_star(), sg), ps.b_star, sheet};
}

std::vector<cd> poles_of(const PeriodSolution& ps, const PeriodContext& ctx) { return {ps.a_star, ctx.y_star()}; }

}  // namespace

int parity_nu(int n_parity, int k)
{
    const int v = (n_parity + k + 1) % 2;
    return v == 0 ? 2 : v;
}

int parity_sigma(int k)
{
    const int v = (k + 1) % 2;
    return v == 0 ? 2 : v;
}

Polyline b_cycle_loop(const SpectralCurve& curve)
{
    const Polyline& g = curve.gamma1;
    double xmin = INFINITY;
    for (cd p : g) xmin = std::min(xmin, -p.real());
    if (!(xmin > 0)) throw NumericalError("b_cycle_loop: gamma1 reaches the imaginary axis");
    const Path<double> arc(g);
    double d = std::min(0.3, 0.4 * xmin);
    for (int attempt = 0; attempt < 8; ++attempt, d /= 2) {
        Polyline s = simplify(g, d / 8);
        const std::size_t m = s.size();
        std::vector<cd> nrm(m);
        for (std::size_t i = 0; i < m; ++i) {
            const cd t = s[std::min(i + 1, m - 1)] - s[i == 0 ? 0 : i - 1];
            nrm[i] = I * t / std::abs(t);
        }
        Polyline loop;
        for (std::size_t i = 0; i < m; ++i) loop.push_back(s[i] - d * nrm[i]);
        const double e0 = std::arg(-nrm[m - 1]);
        for (int k = 1; k < 8; ++k) loop.push_back(s[m - 1] + std::polar(d, e0 + M_PI * k / 8));
        for (std::size_t i = m; i-- > 0;) loop.push_back(s[i] + d * nrm[i]);
        const double s0 = std::arg(nrm[0]);
        for (int k = 1; k < 8; ++k) loop.push_back(s[0] + std::polar(d, s0 + M_PI * k / 8));

        bool ok = true;
        const Path<double> lp(loop, true);
        for (cd p : loop) ok = ok && p.real() < -0.25 * xmin;
        ok = ok && !paths_intersect(lp, arc);
        for (std::size_t i = 0; ok && i < loop.size(); ++i)
            ok = distance_to_path(loop[i], arc) > 0.5 * d;
        // simple polygon
        const std::size_t L = loop.size();
        for (std::size_t i = 0; ok && i < L; ++i)
            for (std::size_t j = i + 2; ok && j < L; ++j) {
                if (i == 0 && j == L - 1) continue;
                if (segments_intersect(loop[i], loop[(i + 1) % L], loop[j], loop[(j + 1) % L])) ok = false;
            }
        if (ok && winding_number(g[g.size() / 2], loop) == 1) return loop;
    }
    throw NumericalError("b_cycle_loop: no admissible loop around gamma1");
}

PeriodContext::PeriodContext(const SpectralCurve& curve) : curve_(curve)
{
    b_loop_ = b_cycle_loop(curve_);
    y_star_ = cd(0, 2.0 / (curve_.lambda * (1 - curve_.x_star)));
    m_.mA0 = a_moment(0);
    m_.mA1 = a_moment(1);
    m_.mB0 = b_moment_on_cut(0);
    m_.mB1 = b_moment_on_cut(1);
}

cd PeriodContext::xi(cd z, int sheet) const
{
    const cd v = curve_.sqrt_q(z);
    return sheet == 2 ? -v : v;
}

cd PeriodContext::beta(cd p, int sheet) const { return xi(p, sheet) * (p * p - 1.0); }

cd PeriodContext::a_moment(int j) const
{
    const cd zs = curve_.z_star;
    auto f = [this, j](cd base, cd off) { return std::pow(base + off, j) / xi_p(curve_, base, off); };
    return integrate_route(f, {-std::conj(zs), zs}, true, true);
}

cd PeriodContext::a_kernel(cd a) const
{
    const cd zs = curve_.z_star;
    const double delta = 0.05 * std::min(curve_.x_star, zs.imag());
    Polyline path{-std::conj(zs), zs};
    if (point_segment_distance(a, path[0], path[1]) < delta) path = {-std::conj(zs), cd(0, zs.imag() + 3 * delta), zs};
    auto f = [this, a](cd base, cd off) { return 1.0 / (((base - a) + off) * xi_p(curve_, base, off)); };
    return integrate_route(f, path, true, true);
}

cd PeriodContext::b_moment_on_cut(int j) const
{
    // + side fixed once per segment at its midpoint, away from the vertices
    const Polyline& g = curve_.gamma1;
    cd total = 0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const cd ref = curve_.sqrt_q_side((g[i] + g[i + 1]) / 2.0, 1, 1);
        auto f = [this, j, ref](cd base, cd off) {
            cd sq = detail::sqrt_q_straight_at(base, off, curve_.lambda, curve_.z_star);
            if (std::abs(sq - ref) > std::abs(sq + ref)) sq = -sq;
            return std::pow(base + off, j) / (sq * (((base - 1.0) + off) * ((base + 1.0) + off)));
        };
        total += integrate_route(f, {g[i], g[i + 1]}, i == 0, i + 2 == g.size());
    }
    return total;
}

cd PeriodContext::b_moment_on_loop(int j) const
{
    auto f = [this, j](cd z) { return std::pow(z, j) / (curve_.sqrt_q(z) * (z * z - 1.0)); };
    return -0.5 * integrate_contour<double>(f, Path<double>(b_loop_, true), period_options());
}

cd PeriodContext::b_kernel(cd a) const
{
    auto f = [this, a](cd z) { return 1.0 / ((z - a) * curve_.sqrt_q(z) * (z * z - 1.0)); };
    return integrate_contour<double>(f, Path<double>(b_loop_, true), period_options());
}

PeriodData periods_m(const PeriodContext& ctx) { return ctx.m(); }

CyclePeriods lambda_a_periods(cd a, int nu, const PeriodContext& ctx)
{
    if (nu != 1 && nu != 2) throw ValidationError("lambda_a_periods: nu must be 1 or 2");
    for (int j : {1, 2})
        if (distance_to_path(a, Path<double>(ctx.curve().arc(j))) < 1e-8)
            throw ValidationError("lambda_a_periods: a lies on a cut");
    const cd beta = ctx.beta(a, nu);
    // the 1/(z - a) halves cancel between the two sheets of A
    const cd A = beta * ctx.a_kernel(a);
    const cd B = double(winding_number(a, ctx.b_loop())) * M_PI * I + 0.5 * beta * ctx.b_kernel(a);
    return {A, B};
}

CyclePeriods omega_periods(cd a, double b, int nu, int sigma, const PeriodContext& ctx)
{
    const CyclePeriods pa = lambda_a_periods(a, nu, ctx);
    const CyclePeriods py = lambda_a_periods(ctx.y_star(), sigma, ctx);
    const PeriodData& m = ctx.m();
    return {pa.A - py.A + 2.0 * b * m.mA0, pa.B - py.B - 2.0 * b * m.mB0};
}

double c_constant(const PeriodContext& ctx, int nu, int sigma)
{
    const PeriodData& m = ctx.m();
    const CyclePeriods py = lambda_a_periods(ctx.y_star(), sigma, ctx);
    const double sgn = nu == 2 ? 1.0 : -1.0;
    const cd comb = -py.A - (m.mA0 / m.mB0) * py.B.real() +
                    sgn * (I * ctx.lambda() / 2.0) * (m.mA0 * m.mB1 / m.mB0 - m.mA1);
    return comb.imag();
}

double b_of_tau(double tau, int nu, int sigma, const PeriodContext& ctx)
{
    const CyclePeriods pa = lambda_a_periods(cd(0, tau), nu, ctx);
    const CyclePeriods py = lambda_a_periods(ctx.y_star(), sigma, ctx);
    return (pa.B - py.B).real() / (2.0 * ctx.m().mB0.real());
}

double psi_a(double tau, int nu, int sigma, const PeriodContext& ctx)
{
    const double b = b_of_tau(tau, nu, sigma, ctx);
    const CyclePeriods p = omega_periods(cd(0, tau), b, nu, sigma, ctx);
    return (p.A / (2 * M_PI * I)).real();
}

PeriodSolution solve_periods(const PeriodContext& ctx, int n_parity, int k, const SolveOptions& opt)
{
    if (n_parity != 0 && n_parity != 1) throw ValidationError("solve_periods: parity must be 0 or 1");
    if (k != 1 && k != 2) throw ValidationError("solve_periods: k must be 1 or 2");
    PeriodSolution ps;
    ps.n_parity = n_parity;
    ps.k = k;
    ps.periods = ctx.m();
    const int nu = parity_nu(n_parity, k), sg = parity_sigma(k);
    ps.periods.parity_nu = nu;
    ps.periods.parity_sigma = sg;
    ps.periods.c_const = c_constant(ctx, nu, sg);
    ps.kappa_multiple = opt.kappa_multiple;
    const double kappa = ctx.curve().kappa * opt.kappa_multiple;
    ps.theta_proximity = std::abs(wrap_to(2 * kappa - ps.periods.c_const, 2 * M_PI));
    if (ps.theta_proximity < opt.theta_tolerance) {
        std::ostringstream os;
        os << "solve_periods: 2 kappa - c is within " << ps.theta_proximity << " of 2 pi Z at lambda = "
           << ctx.lambda();
        throw ThetaStarError(os.str(), ps.theta_proximity);
    }

    // Psi_A lifted along theta, tau = tau0 + tan(theta)
    const double tau0 = ctx.curve().z_star.imag();
    auto tau_of = [tau0](double th) { return tau0 + std::tan(th); };
    auto raw = [&](double th) { return psi_a(tau_of(th), nu, sg, ctx); };
    struct Sample {
        double th, lift;
    };
    std::vector<Sample> s;
    const int K = 48;
    std::vector<double> grid;
    for (int j = 20; j >= 1; --j) grid.push_back(-M_PI / 2 + M_PI / (2 * K) * std::ldexp(1.0, -j));
    for (int i = 0; i < K; ++i) grid.push_back(-M_PI / 2 + M_PI * (i + 0.5) / K);
    for (int j = 1; j <= 20; ++j) grid.push_back(M_PI / 2 - M_PI / (2 * K) * std::ldexp(1.0, -j));
    std::sort(grid.begin(), grid.end());
    s.push_back({grid[0], raw(grid[0])});
    for (std::size_t i = 1; i < grid.size(); ++i) {
        // bisect until consecutive lifted values are close
        std::vector<double> pend{grid[i]};
        while (!pend.empty()) {
            const double th = pend.back();
            const double v = raw(th);
            const double d = wrap_to(v - s.back().lift, 1.0);
            if (std::abs(d) > 0.15 && th - s.back().th > 1e-9) {
                pend.push_back((s.back().th + th) / 2);
                continue;
            }
            s.push_back({th, s.back().lift + d});
            pend.pop_back();
        }
    }
    const double target = kappa / M_PI;  // 2 kappa i / (2 pi i)
    int found = -1;
    double shift = 0;
    for (std::size_t i = 0; i + 1 < s.size() && found < 0; ++i) {
        const double lo = std::min(s[i].lift, s[i + 1].lift), hi = std::max(s[i].lift, s[i + 1].lift);
        const double m = std::ceil(lo - target);
        if (target + m <= hi) {
            found = int(i);
            shift = target + m;
        }
    }
    if (found < 0) {
        std::ostringstream os;
        os << "solve_periods: Psi_A lift [" << s.front().lift << ", " << s.back().lift
           << "] does not reach the target " << target << " mod 1";
        throw NumericalError(os.str(), ps.theta_proximity);
    }
    const Sample left = s[found];
    auto F = [&](double th) { return left.lift + wrap_to(raw(th) - left.lift, 1.0) - shift; };
    const double th = find_root_bracketed<double>(F, s[found].th, s[found + 1].th, opt.tau_tol * 1e-2);
    const double tau = tau_of(th);
    ps.a_star = cd(0, tau);
    ps.b_star = b_of_tau(tau, nu, sg, ctx);
    const CyclePeriods p = omega_periods(ps.a_star, ps.b_star, nu, sg, ctx);
    ps.residual_A = residual_mod(p.A, cd(0, 2 * kappa));
    ps.residual_B = residual_mod(p.B, cd(0, n_parity * M_PI));
    return ps;
}

PeriodSolution solve_for_degree(const ParametrixEval& pe, int n, int k)
{
    if (n < 0) throw ValidationError("solve_for_degree: n must be nonnegative");
    SolveOptions o = pe.options().solve;
    o.kappa_multiple = n;
    return solve_periods(pe.periods(), n % 2, k, o);
}

double two_kappa_minus_c(double lambda)
{
    const SpectralCurve c = solve_boutroux(lambda);
    const PeriodContext ctx(c);
    return 2 * c.kappa - c_constant(ctx, parity_nu(1, 1), parity_sigma(1));
}

ThetaScan theta_star_scan(double lo, double hi, int steps)
{
    if (!(lo > lambda_crit()) || !(hi > lo) || steps < 2)
        throw ValidationError("theta_star_scan: need lambda_c < lo < hi and at least two steps");
    ThetaScan out;
    for (int i = 0; i <= steps; ++i) {
        const double lam = lo + (hi - lo) * i / steps;
        double v = two_kappa_minus_c(lam);
        if (!out.lifted.empty()) {
            const double prev = out.lifted.back();
            v = prev + wrap_to(v - prev, 2 * M_PI);
            out.max_jump = std::max(out.max_jump, std::abs(v - prev));
        }
        out.lambda.push_back(lam);
        out.lifted.push_back(v);
    }
    for (std::size_t i = 0; i + 1 < out.lambda.size(); ++i) {
        const double a = out.lifted[i], b = out.lifted[i + 1];
        const double m = std::ceil(std::min(a, b) / (2 * M_PI));
        if (2 * M_PI * m > std::max(a, b)) continue;
        const double level = 2 * M_PI * m;
        auto f = [&](double lam) { return a + wrap_to(two_kappa_minus_c(lam) - a, 2 * M_PI) - level; };
        if (a == level) {
            out.crossings.push_back(out.lambda[i]);
            continue;
        }
        if (b == level) continue;
        out.crossings.push_back(find_root_bracketed<double>(f, out.lambda[i], out.lambda[i + 1], 1e-10));
    }
    return out;
}

ParametrixEval::ParametrixEval(const CriticalGraph& graph, const ParametrixOptions& opt)
    : graph_(graph), periods_(graph.curve), phi_(graph.curve, kissing::gamma_hat(graph)), opt_(opt)
{
}

ParametrixEval ParametrixEval::build(double lambda, const ParametrixOptions& opt)
{
    return ParametrixEval(build_critical_graph(solve_boutroux(lambda), opt.trace), opt);
}

Polyline ParametrixEval::route_from_one(cd z, const std::vector<cd>& poles) const
{
    std::vector<Path<double>> obs = phi_.obstacles();
    double dz = INFINITY;
    for (const auto& o : obs) dz = std::min(dz, distance_to_path(z, o));
    if (dz < 1e-12 * (1 + std::abs(z))) throw ValidationError("route_from_one: z lies on a cut, gamma_hat or (-inf, -1]");
    for (cd p : poles) {
        double dp = INFINITY;
        for (const auto& o : phi_.obstacles()) dp = std::min(dp, distance_to_path(p, o));
        const double r = std::min(0.05, 0.25 * dp);
        if (std::abs(z - p) <= 2 * r) continue;
        obs.push_back(Path<double>(disc(p, r), true));
        dz = std::min(dz, std::abs(z - p) - r);
    }
    if (z == 1.0) throw ValidationError("route_from_one: z = 1 is the base point");
    const Path<double> direct = Path<double>::segment(1.0 + (z - 1.0) * 1e-7, z);
    bool clear = true;
    for (const auto& o : obs) clear = clear && !paths_intersect(direct, o);
    if (clear) return {1.0, z};
    const cd anchor = 1.0 + 1e-2;
    PlanOptions po;
    po.clearance = std::min(1e-3, dz / 2);
    Polyline r{1.0};
    for (cd v : plan_path(anchor, z, obs, po).vertices) r.push_back(v);
    return r;
}

Polyline ParametrixEval::route_beside(cd s, const Polyline& line, int side, const std::vector<cd>& poles) const
{
    const double h = 1e-3 * std::min(1.0, std::min(std::abs(s - line.front()), std::abs(s - line.back())));
    const cd q = s + double(side) * h * left_normal(line, s);
    Polyline r = route_from_one(q, poles);
    r.push_back(s);
    return r;
}

namespace {

cd eta4(const SpectralCurve& c, cd z)
{
    const cd zs = c.z_star;
    return (z + 1.0) * (z - zs) / ((z + std::conj(zs)) * (z - 1.0));
}

}  // namespace

cd ParametrixEval::eta_along(const Polyline& tail) const
{
    const SpectralCurve& c = curve();
    const cd z = tail.front();
    double dz = INFINITY;
    for (int j : {1, 2}) dz = std::min(dz, distance_to_path(z, Path<double>(c.arc(j))));
    if (dz < 1e-12 * (1 + std::abs(z))) throw ValidationError("eta: z lies on gamma1 or gamma2");
    const cd start(0, std::max(1e3, 4 * std::abs(z)));
    PlanOptions po;
    po.clearance = std::min(1e-3, dz / 2);
    Polyline route = plan_path(start, z, {Path<double>(c.gamma1), Path<double>(c.gamma2)}, po).vertices;
    for (std::size_t i = 1; i < tail.size(); ++i) route.push_back(tail[i]);
    auto g = [&c](cd w) { return eta4(c, w); };
    const cd e0 = std::pow(g(start), 0.25);
    return continue_branch<double>(g, 4, Path<double>(route), e0).final_value();
}

cd eta(cd z, const ParametrixEval& pe) { return pe.eta_along({z}); }

cd eta_beside(cd s, const Polyline& line, int side, const ParametrixEval& pe)
{
    const double h = 1e-3 * std::min(1.0, std::min(std::abs(s - line.front()), std::abs(s - line.back())));
    const cd q = s + double(side) * h * left_normal(line, s);
    return pe.eta_along({q, s});
}

Mat2 N_from_eta(cd e)
{
    const cd p = (e + 1.0 / e) / 2.0, m = e - 1.0 / e;
    Mat2 N;
    N << p, m / (-2.0 * I), m / (2.0 * I), p;
    return N;
}

Mat2 N_matrix(cd z, const ParametrixEval& pe) { return N_from_eta(eta(z, pe)); }

namespace {

cd u_along(const Polyline& route, int sheet, int n, const PeriodSolution& ps, const ParametrixEval& pe)
{
    const OmegaIntegrand f = omega_of(ps, pe.periods(), sheet);
    cd v = integrate_route(f, route, route.front() == 1.0, false);
    if (sheet == 2) v -= I * double(n) * pe.curve().kappa;
    return v;
}

// int_{iR}^{i inf} of the integrand, in t = 1/s
cd tail_integral(const OmegaIntegrand& f, double R)
{
    auto g = [&f](cd t) {
        const cd z = I / t;
        return f(z, 0) * I / (t * t);
    };
    return integrate_contour<double>(g, Path<double>::segment(0, 1.0 / R), period_options());
}

}  // namespace

cd u_value(cd z, int sheet, int n, const PeriodSolution& ps, const ParametrixEval& pe)
{
    if (sheet != 1 && sheet != 2) throw ValidationError("u_value: sheet must be 1 or 2");
    return u_along(pe.route_from_one(z, poles_of(ps, pe.periods())), sheet, n, ps, pe);
}

cd u_beside(cd s, const Polyline& line, int side, int sheet, int n, const PeriodSolution& ps,
            const ParametrixEval& pe)
{
    return u_along(pe.route_beside(s, line, side, poles_of(ps, pe.periods())), sheet, n, ps, pe);
}

cd u_infinity(int sheet, int n, const PeriodSolution& ps, const ParametrixEval& pe)
{
    const double R = std::max({10.0, 2 * std::abs(ps.a_star), 2 * std::abs(pe.y_star())});
    cd v = u_value(cd(0, R), sheet, n, ps, pe);
    return v + tail_integral(omega_of(ps, pe.periods(), sheet), R);
}

cd u11(cd z, const PeriodSolution& ps, const ParametrixEval& pe)
{
    if (ps.k != 1) throw ValidationError("u11: solution must be for k = 1");
    return u_value(z, 1, ps.n_parity, ps, pe);
}

ModelSolution model_solution(int n, const ParametrixEval& pe)
{
    if (n < 0) throw ValidationError("model_solution: n must be nonnegative");
    ModelSolution ms;
    ms.n = n;
    ms.k1 = solve_for_degree(pe, n, 1);
    ms.k2 = solve_for_degree(pe, n, 2);
    ms.log_c1 = u_infinity(1, n, ms.k1, pe);
    ms.log_c2 = u_infinity(2, n, ms.k2, pe);
    return ms;
}

namespace {

Mat2 assemble_M(const Mat2& N, const cd u[2][2], const ModelSolution& ms)
{
    // u[k][j] = u_{j+1}^{(k+1)}
    Mat2 M;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) M(k, j) = N(k, j) * std::exp(u[k][j] - (k == 0 ? ms.log_c1 : ms.log_c2));
    return M;
}

}  // namespace

Mat2 M_matrix(cd z, const ModelSolution& ms, const ParametrixEval& pe)
{
    const Mat2 N = N_matrix(z, pe);
    cd u[2][2];
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) u[k][j] = u_value(z, j + 1, ms.n, k == 0 ? ms.k1 : ms.k2, pe);
    return assemble_M(N, u, ms);
}

Mat2 M_beside(cd s, const Polyline& line, int side, const ModelSolution& ms, const ParametrixEval& pe)
{
    const Mat2 N = N_from_eta(eta_beside(s, line, side, pe));
    cd u[2][2];
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) u[k][j] = u_beside(s, line, side, j + 1, ms.n, k == 0 ? ms.k1 : ms.k2, pe);
    return assemble_M(N, u, ms);
}

Mat2 M_jump(int arc, int n, double kappa)
{
    Mat2 J;
    const cd e = std::exp(I * kappa * double(n));
    if (arc == 1)
        J << 0, e, -1.0 / e, 0;
    else if (arc == 2)
        J << 0, 1.0 / e, -e, 0;
    else if (arc == 0)
        J << (n % 2 ? -1.0 : 1.0), 0, 0, (n % 2 ? -1.0 : 1.0);
    else
        throw ValidationError("M_jump: arc must be 0, 1 or 2");
    return J;
}

cd psi_amplitude(cd z, const PeriodSolution& ps, const ParametrixEval& pe)
{
    const cd e = eta(z, pe);
    return (e * e + 1.0) / (2.0 * e) * std::exp(u11(z, ps, pe) - u_infinity(1, ps.n_parity, ps, pe));
}

cd strong_asymptotic(int n, cd z, const ParametrixEval& pe, const PeriodSolution& ps, const std::optional<Polyline>& route)
{
    if (n < 1) throw ValidationError("strong_asymptotic: n must be positive");
    if (n % 2 != ps.n_parity || ps.kappa_multiple != n || ps.k != 1)
        throw ValidationError("strong_asymptotic: solution was not built for degree n and k = 1");
    const SpectralCurve& c = pe.curve();
    for (int j : {1, 2})
        if (distance_to_path(z, Path<double>(c.arc(j))) < 1e-6)
            throw ValidationError("strong_asymptotic: z is too close to a cut");
    if (n % 2 == 1 && std::abs(z - ps.a_star) < 1e-6) throw ValidationError("strong_asymptotic: z is at the zero a_*");
    const Polyline r = route ? *route : pe.route_from_one(z, poles_of(ps, pe.periods()));
    if (r.front() != 1.0 || r.back() != z) throw ValidationError("strong_asymptotic: route must run from 1 to z");
    OmegaIntegrand f = omega_of(ps, pe.periods(), 1);
    f.n_xi = n;
    const cd E = integrate_route(f, r, true, false) - u_infinity(1, n, ps, pe) -
                 double(n) * (pe.phi().ell() + I * c.lambda * z / 2.0);
    const cd e = eta(z, pe);
    return (e * e + 1.0) / (2.0 * e) * std::exp(E);
}

cd conformal_f_B(cd z, const PhiFunction& pf)
{
    if (std::abs(z - 1.0) > 0.1) throw ValidationError("conformal_f_B: z is outside the disc |z - 1| <= 0.1");
    const SpectralCurve& c = pf.curve();
    if (std::abs(z - 1.0) < 1e-9) {
        const cd res = -(c.lambda * c.lambda / 4) * (1.0 - c.z_star) * (1.0 + std::conj(c.z_star)) / 2.0;
        return res * (z - 1.0);
    }
    const cd v = pf.integral_from_one(z);
    return v * v / 4.0;
}

cd f_A_slope(const PhiFunction& pf)
{
    const SpectralCurve& c = pf.curve();
    const cd a = -std::conj(c.z_star);
    const cd qp = -(c.lambda * c.lambda / 4) * (a - c.z_star) / (a * a - 1.0);
    const cd d1 = c.gamma1[c.gamma1.size() - 2] - a;
    const cd u = d1 / std::abs(d1);
    cd best = 0;
    double bd = INFINITY;
    for (int k = 0; k < 3; ++k) {
        const cd r = std::pow(qp, 1.0 / 3) * std::polar(1.0, 2 * M_PI * k / 3);
        const double dev = std::abs(std::arg(-r * u));
        if (dev < bd) {
            bd = dev;
            best = r;
        }
    }
    return best;
}

cd conformal_f_A(cd z, const PhiFunction& pf)
{
    const SpectralCurve& c = pf.curve();
    const cd a = -std::conj(c.z_star);
    if (std::abs(z - a) > 0.1) throw ValidationError("conformal_f_A: z is outside the disc |z + conj z_*| <= 0.1");
    const cd g0 = f_A_slope(pf);
    if (std::abs(z - a) < 1e-9) return g0 * (z - a);
    const cd w = 1.5 * (pf.phi2(z) + pf.kappa_half());
    const cd ref = g0 * (z - a);
    const cd r0 = std::pow(w * w, 1.0 / 3);
    cd best = r0;
    for (int k = 1; k < 3; ++k) {
        const cd r = r0 * std::polar(1.0, 2 * M_PI * k / 3);
        if (std::abs(r - ref) < std::abs(best - ref)) best = r;
    }
    return best;
}

}  // namespace kissing
