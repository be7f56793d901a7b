#include "kissing/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kissing {

namespace {

const cd I(0, 1);

IntegrationOptions integration_options()
{
    IntegrationOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-14;
    opt.max_panels = 20000;
    return opt;
}

double crit_residual(double lam)
{
    const double r = std::sqrt(lam * lam + 4);
    return 2 * std::log((2 + r) / lam) - r;
}

// + side value on the open left segment -1 -> -conj z_l, at s = base + off
cd sqrt_q_plus_left_at(cd base, cd off, double lambda, cd zl)
{
    const cd a = -std::conj(zl);
    const double r = std::abs((base - a) + off) / std::abs((base + 1.0) + off);
    return -(I * lambda / 2.0) * std::sqrt(((base - zl) + off) / ((base - 1.0) + off)) * (I * std::sqrt(r));
}

bool in_box(cd z, const Polyline& p)
{
    double x0 = z.real(), y0 = z.imag();
    double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
    for (cd v : p) {
        lo_x = std::min(lo_x, v.real());
        hi_x = std::max(hi_x, v.real());
        lo_y = std::min(lo_y, v.imag());
        hi_y = std::max(hi_y, v.imag());
    }
    return x0 >= lo_x && x0 <= hi_x && y0 >= lo_y && y0 <= hi_y;
}

// int_a^b f(base, off) with off measured from the nearer declared-singular endpoint
template <class F>
cd integrate_segment(F&& f, cd a, cd b, bool sa, bool sb)
{
    const auto opt = integration_options();
    auto from = [&f](cd base) { return [&f, base](cd off) { return f(base, off); }; };
    if (sa && sb) {
        const cd m = (a + b) / 2.0;
        return integrate_contour<double>(from(a), Path<double>::segment(0, m - a), opt, {true, false}) +
               integrate_contour<double>(from(b), Path<double>::segment(m - b, 0), opt, {false, true});
    }
    if (sa) return integrate_contour<double>(from(a), Path<double>::segment(0, b - a), opt, {true, false});
    if (sb) return integrate_contour<double>(from(b), Path<double>::segment(a - b, 0), opt, {false, true});
    return integrate_contour<double>(from(a), Path<double>::segment(0, b - a), opt);
}

double endpoint_distance(const Polyline& line, cd s)
{
    return std::min(std::abs(s - line.front()), std::abs(s - line.back()));
}

}  // namespace

double lambda_crit()
{
    return find_root_bracketed<double>(crit_residual, 1.0, 2.0, 1e-15);
}

cd Q(cd z, double lambda, double x)
{
    if (std::abs(z - 1.0) == 0 || std::abs(z + 1.0) == 0) throw ValidationError("Q: z is a pole (z = +-1)");
    const cd zl = z_lambda(lambda, x);
    return -(lambda * lambda / 4) * (z - zl) * (z + std::conj(zl)) / (z * z - 1.0);
}

namespace detail {

cd sqrt_q_straight(cd z, double lambda, cd zl)
{
    return -(I * lambda / 2.0) * std::sqrt((z - zl) / (z - 1.0)) * std::sqrt((z + std::conj(zl)) / (z + 1.0));
}

cd sqrt_q_straight_at(cd base, cd off, double lambda, cd zl)
{
    const cd a = -std::conj(zl);
    return -(I * lambda / 2.0) * std::sqrt(((base - zl) + off) / ((base - 1.0) + off)) *
           std::sqrt(((base - a) + off) / ((base + 1.0) + off));
}

cd sqrt_q_plus_right_at(cd base, cd off, double lambda, cd zl)
{
    const double r = std::abs((base - zl) + off) / std::abs((1.0 - base) - off);
    return -(I * lambda / 2.0) * (-I * std::sqrt(r)) *
           std::sqrt(((base + std::conj(zl)) + off) / ((base + 1.0) + off));
}

cd sqrt_q_plus_right(cd s, double lambda, cd zl) { return sqrt_q_plus_right_at(s, 0, lambda, zl); }

}  // namespace detail

SegmentIntegrals segment_integrals(double lambda, double x)
{
    const cd zl = z_lambda(lambda, x), a = -std::conj(zl);
    SegmentIntegrals out;
    out.right = integrate_segment(
        [&](cd base, cd off) { return detail::sqrt_q_plus_right_at(base, off, lambda, zl); }, zl, 1.0, true, true);
    out.left = integrate_segment([&](cd base, cd off) { return sqrt_q_plus_left_at(base, off, lambda, zl); },
                                 -1.0, a, true, true);
    if (x == 0) return out;
    out.middle = integrate_segment(
        [&](cd base, cd off) { return detail::sqrt_q_straight_at(base, off, lambda, zl); }, a, zl, true, true);
    return out;
}

double psi(double x, double lambda)
{
    if (!(x >= 0 && x <= 1)) throw ValidationError("psi: x must lie in [0, 1]");
    if (!(lambda > 0) || !std::isfinite(lambda)) throw ValidationError("psi: lambda must be positive");
    const cd zl = z_lambda(lambda, x);
    return integrate_segment(
               [&](cd base, cd off) { return detail::sqrt_q_plus_right_at(base, off, lambda, zl); }, zl, 1.0,
               true, true)
        .real();
}

int SpectralCurve::arc_parity(cd z, int j) const
{
    const Polyline& p = arc(j);
    if (p.size() < 3 || !in_box(z, p)) return 0;
    return winding_number(z, p) & 1;
}

cd SpectralCurve::sqrt_q(cd z) const
{
    cd v = detail::sqrt_q_straight(z, lambda, z_star);
    if (mode == CutMode::Arc && ((arc_parity(z, 1) + arc_parity(z, 2)) & 1)) v = -v;
    return v;
}

cd SpectralCurve::sqrt_q_at(cd base, cd off) const
{
    cd v = detail::sqrt_q_straight_at(base, off, lambda, z_star);
    if (mode == CutMode::Arc) {
        const cd z = base + off;
        if ((arc_parity(z, 1) + arc_parity(z, 2)) & 1) v = -v;
    }
    return v;
}

cd SpectralCurve::sqrt_q_side(cd s, int j, int side) const
{
    if (j != 1 && j != 2) throw ValidationError("sqrt_q_side: arc must be 1 or 2");
    const Polyline& p = arc(j);
    const double h = 1e-4 * std::min(1.0, endpoint_distance(p, s));
    const cd ref = sqrt_q(s + double(side) * h * left_normal(p, s));
    const cd c = detail::sqrt_q_straight(s, lambda, z_star);
    return std::abs(ref - c) <= std::abs(ref + c) ? c : -c;
}

SpectralCurve SpectralCurve::with_arcs(const Polyline& g2) const
{
    if (g2.size() < 2) throw ValidationError("with_arcs: arc needs at least two vertices");
    if (std::abs(g2.front() - z_star) > 1e-6 || std::abs(g2.back() - 1.0) > 1e-6)
        throw ValidationError("with_arcs: gamma2 must run from z_* to 1");
    SpectralCurve c = *this;
    c.mode = CutMode::Arc;
    c.gamma2 = g2;
    c.gamma2.front() = z_star;
    c.gamma2.back() = 1.0;
    c.gamma1.clear();
    for (auto it = c.gamma2.rbegin(); it != c.gamma2.rend(); ++it) c.gamma1.push_back(-std::conj(*it));
    return c;
}

SpectralCurve solve_boutroux(double lambda)
{
    if (!std::isfinite(lambda)) throw ValidationError("solve_boutroux: lambda must be finite");
    const double lc = lambda_crit();
    if (lambda <= lc) {
        std::ostringstream os;
        os << "solve_boutroux: lambda = " << lambda << " is not above lambda_c = " << lc;
        throw ValidationError(os.str());
    }
    auto f = [lambda](double x) { return psi(x, lambda); };
    double x;
    try {
        x = find_root_bracketed<double>(f, 0.0, 1.0, 1e-15);
    } catch (const ValidationError&) {
        throw NumericalError("solve_boutroux: psi does not change sign on [0, 1]", f(0.0));
    }
    SpectralCurve c;
    c.lambda = lambda;
    c.x_star = x;
    c.z_star = z_lambda(lambda, x);
    c.gamma1 = {-1.0, -std::conj(c.z_star)};
    c.gamma2 = {c.z_star, 1.0};
    const SegmentIntegrals s = segment_integrals(lambda, x);
    c.kappa = s.middle.imag();
    if (std::abs(s.middle.real()) > 1e-10 * std::max(1.0, std::abs(c.kappa)))
        throw NumericalError("solve_boutroux: kappa is not real", s.middle.real());
    if (std::abs(s.right - I * (M_PI / 2)) > 1e-8)
        throw NumericalError("solve_boutroux: half-mass identity violated", std::abs(s.right - I * (M_PI / 2)));
    return c;
}

cd left_normal(const Polyline& line, cd s)
{
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        double d = point_segment_distance(s, line[i], line[i + 1]);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    cd t = line[best + 1] - line[best];
    return I * t / std::abs(t);
}

BranchTrack<double> q_sqrt_plus(const Polyline& path_on_cut, const SpectralCurve& curve, int arc)
{
    if (path_on_cut.empty()) throw ValidationError("q_sqrt_plus: empty path");
    const Polyline& cut = curve.arc(arc);
    const double R = 1e3;
    const cd start(0, R);
    const cd g0 = curve.q(start);
    cd w0 = std::sqrt(g0);
    const cd asym = -I * curve.lambda / 2.0 - 1.0 / start;
    if (std::abs(-w0 - asym) < std::abs(w0 - asym)) w0 = -w0;

    const cd p0 = path_on_cut.front();
    const double h = 1e-3 * std::min(1.0, endpoint_distance(cut, p0));
    const cd side = p0 + h * left_normal(cut, p0);
    PlanOptions po;
    po.clearance = std::min(1e-3, h / 4);
    Path<double> route =
        plan_path(start, side, {Path<double>(curve.gamma1), Path<double>(curve.gamma2)}, po);
    std::vector<cd> v = route.vertices;
    for (cd p : path_on_cut) v.push_back(p);
    auto g = [&curve](cd z) { return curve.q(z); };
    BranchTrack<double> full = continue_branch<double>(g, 2, Path<double>(v), w0);
    BranchTrack<double> out{p0, {}, {}, {}};
    bool on = false;
    for (std::size_t k = 0; k < full.points.size(); ++k) {
        if (!on && full.points[k] == p0) {
            on = true;
            out.base_value = full.values[k];
        }
        if (on) {
            out.points.push_back(full.points[k]);
            out.values.push_back(full.values[k]);
        }
    }
    return out;
}

PhiFunction::PhiFunction(const SpectralCurve& curve, Polyline gamma_hat)
    : curve_(curve), gamma_hat_(std::move(gamma_hat))
{
    if (gamma_hat_.empty()) gamma_hat_ = {-std::conj(curve_.z_star), curve_.z_star};
    obstacles_ = {Path<double>(curve_.gamma1), Path<double>(curve_.gamma2), Path<double>(gamma_hat_),
                  Path<double>::segment(-1.0, -1e7)};
    ell_ = compute_ell();
}

void PhiFunction::check_off_cut(cd z) const
{
    for (const auto& o : obstacles_)
        if (distance_to_path(z, o) < 1e-12 * (1 + std::abs(z)))
            throw ValidationError("phi: z lies on a cut or on (-inf, -1]");
}

cd PhiFunction::integrate_from(cd base, cd z, cd anchor_dir) const
{
    auto f = [this](cd s) { return curve_.sqrt_q(s); };
    const auto opt = integration_options();
    if (z == base) return 0;
    bool clear = true;
    const Path<double> direct = Path<double>::segment(base + (z - base) * 1e-7, z);
    for (const auto& o : obstacles_) clear = clear && !paths_intersect(direct, o);
    auto rel = [this](cd b, cd off) { return curve_.sqrt_q_at(b, off); };
    if (clear) return integrate_segment(rel, base, z, true, false);
    const cd anchor = base + 1e-2 * anchor_dir / std::abs(anchor_dir);
    cd v = integrate_segment(rel, base, anchor, true, false);
    PlanOptions po;
    double dz = INFINITY;
    for (const auto& o : obstacles_) dz = std::min(dz, distance_to_path(z, o));
    po.clearance = std::min(1e-3, dz / 2);
    Path<double> route = plan_path(anchor, z, obstacles_, po);
    return v + integrate_contour<double>(f, route, opt);
}

cd PhiFunction::integral_from_one(cd z) const
{
    check_off_cut(z);
    return integrate_from(1.0, z, 1.0);
}

PhiValue PhiFunction::phi(cd z) const
{
    const cd v = (z == 1.0 ? cd(0) : integral_from_one(z)) + kappa_half();
    double im = std::remainder(v.imag(), M_PI);
    if (im <= -M_PI / 2) im += M_PI;
    return {v, cd(v.real(), im)};
}

PhiValue PhiFunction::phi_beside(cd s, const Polyline& line, int side) const
{
    const double h = 1e-3 * std::min(1.0, endpoint_distance(line, s));
    const cd q = s + double(side) * h * left_normal(line, s);
    cd v = phi(q).value;
    v += integrate_contour<double>([this](cd t) { return curve_.sqrt_q(t); }, Path<double>::segment(q, s),
                                   integration_options());
    double im = std::remainder(v.imag(), M_PI);
    if (im <= -M_PI / 2) im += M_PI;
    return {v, cd(v.real(), im)};
}

PhiValue PhiFunction::phi_side(cd s, int j, int side) const { return phi_beside(s, curve_.arc(j), side); }

cd PhiFunction::phi2(cd z) const
{
    const cd a = -std::conj(curve_.z_star);
    if (z == a) return -kappa_half();
    check_off_cut(z);
    const cd d1 = curve_.gamma1[curve_.gamma1.size() - 2] - a;
    const cd d2 = gamma_hat_[1] - a;
    // bisector of the gap between the two cuts leaving a that contains the direction to z
    double t1 = std::arg(d1), t2 = std::arg(d2), tz = std::arg(z - a);
    auto ccw = [](double from, double to) {
        double d = to - from;
        while (d < 0) d += 2 * M_PI;
        return d;
    };
    double mid;
    if (ccw(t1, tz) < ccw(t1, t2))
        mid = t1 + ccw(t1, t2) / 2;
    else
        mid = t2 + ccw(t2, t1) / 2;
    return integrate_from(a, z, std::polar(1.0, mid)) - kappa_half();
}

cd ell_at(const PhiFunction& pf, double R)
{
    const cd z(0, R);
    const double lam = pf.curve().lambda;
    return -I * lam * z / 2.0 - std::log(z) + pf.kappa_half() - pf.phi(z).value;
}

cd PhiFunction::compute_ell() const
{
    auto at = [this](double R) {
        const cd z(0, R);
        return -I * curve_.lambda * z / 2.0 - std::log(z) + kappa_half() - (integral_from_one(z) + kappa_half());
    };
    const double R = 1e3;
    const cd l1 = at(R), l2 = at(2 * R), l4 = at(4 * R);
    const cd e1 = 2.0 * l2 - l1, e2 = 2.0 * l4 - l2;
    if (std::abs(e1 - e2) > 1e-6) throw NumericalError("ell_constant: extrapolation does not settle", std::abs(e1 - e2));
    return e1;
}

cd ell_constant(const PhiFunction& pf) { return pf.ell(); }

}  // namespace kissing
