#include "kissing/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace kissing {

namespace {

const cd I(0, 1);

IntegrationOptions step_options()
{
    IntegrationOptions o;
    o.abs_tol = 1e-14;
    o.rel_tol = 1e-12;
    o.max_panels = 2000;
    return o;
}

// unit direction of the trajectory through z, the sign continuous with vref
cd field(const SpectralCurve& c, cd z, cd vref)
{
    const cd q = c.q(z);
    cd v = std::sqrt(-std::conj(q) / std::abs(q));
    if ((v * std::conj(vref)).real() < 0) v = -v;
    return v;
}

// branch of Q^{1/2} with Q^{1/2} v = i |Q^{1/2}|
cd oriented_root(const SpectralCurve& c, cd z, cd v) { return I * std::sqrt(std::abs(c.q(z))) * std::conj(v); }

// int_a^b Q^{1/2} on a short chord, the branch matched to wa at a
cd chord_integral(const SpectralCurve& c, cd a, cd b, cd wa)
{
    if (a == b) return 0;
    auto f = [&](cd s) {
        cd w = std::sqrt(c.q(s));
        return std::abs(w - wa) <= std::abs(w + wa) ? w : -w;
    };
    return integrate_contour<double>(f, Path<double>::segment(a, b), step_options());
}

struct State {
    cd z;
    cd v;
    cd F;  // int Q^{1/2} from the start of the arc
};

class Tracer {
public:
    Tracer(const SpectralCurve& c, const TraceOptions& o) : c_(c), o_(o)
    {
        zeros_ = {c.z_star, -std::conj(c.z_star)};
    }

    cd rk4(cd z, cd v, double h) const
    {
        const cd k1 = field(c_, z, v);
        const cd k2 = field(c_, z + 0.5 * h * k1, k1);
        const cd k3 = field(c_, z + 0.5 * h * k2, k2);
        const cd k4 = field(c_, z + h * k3, k3);
        return z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // Newton on Re F across the trajectory
    State project(const State& from, cd z) const
    {
        const cd w0 = oriented_root(c_, from.z, from.v);
        State s{z, field(c_, z, from.v), 0};
        for (int it = 0; it < 8; ++it) {
            s.F = from.F + chord_integral(c_, from.z, s.z, w0);
            const double re = s.F.real();
            const cd w = oriented_root(c_, s.z, s.v);
            if (std::abs(re) < 1e-14 * (1 + std::abs(s.F))) break;
            const cd n = I * s.v;
            s.z += re / std::abs(w) * n;
            s.v = field(c_, s.z, s.v);
        }
        return s;
    }

    State advance(const State& s, double h) const { return project(s, rk4(s.z, s.v, h)); }

    double h_cap(cd z) const
    {
        double cap = o_.max_step * std::max(1.0, std::abs(z));
        for (cd p : zeros_) {
            const double d = std::abs(z - p);
            if (d > 0) cap = std::min(cap, 0.5 * d);
        }
        cap = std::min(cap, 0.5 * std::abs(z - 1.0));
        cap = std::min(cap, 0.5 * std::abs(z + 1.0));
        return cap;
    }

    // adaptive step by step doubling; returns the accepted state and updates h
    State step(const State& s, double& h) const
    {
        for (int tries = 0; tries < 60; ++tries) {
            h = std::min(h, h_cap(s.z));
            const cd full = rk4(s.z, s.v, h);
            const cd mid = rk4(s.z, s.v, h / 2);
            const cd half = rk4(mid, field(c_, mid, s.v), h / 2);
            const double err = std::abs(full - half);
            if (err <= o_.tol || h <= 1e-12) {
                State out = project(s, half);
                const double grow = err > 0 ? 0.9 * std::pow(o_.tol / err, 0.2) : 2.0;
                h *= std::clamp(grow, 0.5, 2.0);
                return out;
            }
            h *= std::max(0.25, 0.9 * std::pow(o_.tol / err, 0.2));
        }
        throw NumericalError("trace: step size underflow");
    }

    // state on the trajectory where g crosses zero, between s (g < 0 side excluded) and a step of h
    template <class G>
    State locate(const State& s, double h, G&& g) const
    {
        auto at = [&](double t) { return g(advance(s, t).z); };
        const double t = find_root_bracketed<double>(at, 0.0, h, 1e-15);
        return advance(s, t);
    }

    const SpectralCurve& c_;
    const TraceOptions& o_;
    std::vector<cd> zeros_;
};

void push(TrajectoryArc& arc, const SpectralCurve& c, const State& s)
{
    arc.points.push_back(s.z);
    arc.cum_integral.push_back(s.F);
    arc.density.push_back(std::sqrt(std::abs(c.q(s.z))) / M_PI);
}

EndKind zero_kind(const SpectralCurve& c, cd p)
{
    return std::abs(p - c.z_star) < std::abs(p + std::conj(c.z_star)) ? EndKind::ZeroStar : EndKind::ZeroStarMirror;
}

double angle_to_real_axis(cd z)
{
    const double a = std::abs(std::arg(z));
    return std::min(a, M_PI - a);
}

TrajectoryArc reflect(const TrajectoryArc& a, EndKind start, EndKind end)
{
    TrajectoryArc r;
    const std::size_t n = a.points.size();
    const cd total = a.cum_integral.back();
    for (std::size_t k = 0; k < n; ++k) {
        r.points.push_back(-std::conj(a.points[n - 1 - k]));
        r.cum_integral.push_back(std::conj(total - a.cum_integral[n - 1 - k]));
        r.density.push_back(a.density[n - 1 - k]);
    }
    r.start_kind = start;
    r.end_kind = end;
    r.end_distance = a.end_distance;
    return r;
}

double polyline_distance(cd p, const Polyline& line)
{
    double d = INFINITY;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) d = std::min(d, point_segment_distance(p, line[i], line[i + 1]));
    return d;
}

}  // namespace

std::string to_string(EndKind k)
{
    switch (k) {
    case EndKind::ZeroStar: return "zero_z_star";
    case EndKind::ZeroStarMirror: return "zero_minus_conj_z_star";
    case EndKind::PolePlus: return "pole_plus_one";
    case EndKind::PoleMinus: return "pole_minus_one";
    case EndKind::AxisCrossing: return "imaginary_axis_crossing";
    case EndKind::Escape: return "escape_to_infinity";
    case EndKind::Regular: return "regular";
    }
    return "unknown";
}

double TrajectoryArc::max_real_residual() const
{
    double m = 0;
    for (cd f : cum_integral) m = std::max(m, std::abs(f.real()));
    return m;
}

double TrajectoryArc::max_step() const
{
    double m = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) m = std::max(m, std::abs(points[i + 1] - points[i]));
    return m;
}

std::vector<double> TrajectoryArc::arclength() const
{
    std::vector<double> s(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i) s[i] = s[i - 1] + std::abs(points[i] - points[i - 1]);
    return s;
}

double TrajectoryArc::length() const { return points.empty() ? 0 : arclength().back(); }

std::array<double, 3> critical_directions(cd q_prime)
{
    if (std::abs(q_prime) < 1e-12) throw ValidationError("critical_directions: Q'(p) vanishes, not a simple zero");
    std::array<double, 3> t;
    for (int k = 0; k < 3; ++k) {
        double a = (M_PI - std::arg(q_prime) + 2 * M_PI * k) / 3;
        a = std::fmod(a, 2 * M_PI);
        if (a < 0) a += 2 * M_PI;
        t[k] = a;
    }
    std::sort(t.begin(), t.end());
    return t;
}

std::array<double, 3> critical_directions(const SpectralCurve& curve, cd p)
{
    const cd a = -std::conj(curve.z_star);
    const double scale = std::abs(curve.z_star);
    cd other;
    if (std::abs(p - curve.z_star) <= 1e-12 * scale)
        other = a;
    else if (std::abs(p - a) <= 1e-12 * scale)
        other = curve.z_star;
    else
        throw ValidationError("critical_directions: p is not a zero of Q");
    const double lam = curve.lambda;
    const cd qp = -(lam * lam / 4) * (p - other) / (p * p - 1.0);
    return critical_directions(qp);
}

TrajectoryArc trace(const SpectralCurve& curve, cd start, double direction, const TraceOptions& opt)
{
    Tracer tr(curve, opt);
    TrajectoryArc arc;
    const cd dir = std::polar(1.0, direction);
    const cd a = -std::conj(curve.z_star);
    const bool from_zero = std::abs(start - curve.z_star) < 1e-12 || std::abs(start - a) < 1e-12;

    State s;
    if (from_zero) {
        arc.start_kind = zero_kind(curve, start);
        const cd seed = start + opt.seed_offset * std::abs(curve.z_star) * dir;
        const cd v = field(curve, seed, dir);
        const cd w = oriented_root(curve, seed, v);
        // branch along the seed ray follows w * sqrt((s - p)/(seed - p))
        auto f = [&](cd off) {
            const cd r = std::sqrt(curve.q_at(start, off));
            const cd ref = w * std::sqrt(std::abs(off) / std::abs(seed - start));
            return std::abs(r - ref) <= std::abs(r + ref) ? r : -r;
        };
        const cd F =
            integrate_contour<double>(f, Path<double>::segment(0, seed - start), step_options(), {true, false});
        push(arc, curve, State{start, v, 0});
        arc.density.back() = 0;
        s = tr.project(State{seed, v, F}, seed);
    } else {
        s = State{start, field(curve, start, dir), 0};
    }
    push(arc, curve, s);

    const double side = start.real() >= 0 ? 1.0 : -1.0;
    double R = opt.escape_radius;
    double h = opt.max_step / 4;
    double length = 0;
    const double cap = std::max(opt.length_cap, 2 * opt.escape_radius_max);
    while (true) {
        if (length > (R > opt.escape_radius ? cap : opt.length_cap)) {
            std::ostringstream os;
            os << "trace: arc-length cap reached at z = " << s.z.real() << (s.z.imag() < 0 ? "" : "+") << s.z.imag()
               << "i";
            throw TraceError(os.str(), arc);
        }
        // pole capture and polish
        for (double pole : {1.0, -1.0}) {
            if (std::abs(s.z - pole) < opt.capture_radius) {
                while (std::abs(s.z - pole) > opt.polish_radius) {
                    State n = tr.advance(s, 0.5 * std::abs(s.z - pole));
                    if (std::abs(n.z - pole) >= std::abs(s.z - pole)) break;
                    s = n;
                    push(arc, curve, s);
                }
                arc.end_distance = std::abs(s.z - pole);
                const cd w = oriented_root(curve, s.z, s.v);
                auto f = [&](cd off) {
                    const cd r = std::sqrt(curve.q_at(pole, off));
                    const cd ref = w * std::sqrt(std::abs(s.z - pole) / std::abs(off));
                    return std::abs(r - ref) <= std::abs(r + ref) ? r : -r;
                };
                const cd tail = integrate_contour<double>(f, Path<double>::segment(s.z - pole, 0), step_options(),
                                                          {false, true});
                arc.points.push_back(pole);
                arc.cum_integral.push_back(s.F + tail);
                arc.density.push_back(INFINITY);
                arc.end_kind = pole > 0 ? EndKind::PolePlus : EndKind::PoleMinus;
                return arc;
            }
        }
        // landing on the other zero
        for (cd p : tr.zeros_) {
            if (std::abs(p - start) < 1e-12) continue;
            if (std::abs(s.z - p) < opt.capture_radius) {
                arc.points.push_back(p);
                arc.cum_integral.push_back(s.F);
                arc.density.push_back(0);
                arc.end_kind = zero_kind(curve, p);
                return arc;
            }
        }

        double hs = h;
        State n = tr.step(s, hs);
        const double taken = std::abs(n.z - s.z);
        if (side * n.z.real() < 0) {
            const State e = tr.locate(s, taken * 1.5, [&](cd z) { return side * z.real(); });
            if (side * e.z.real() <= 1e-13) {
                push(arc, curve, e);
                arc.points.back() = cd(0, e.z.imag());
                arc.end_kind = EndKind::AxisCrossing;
                return arc;
            }
        }
        if (std::abs(n.z) > R) {
            if (angle_to_real_axis(n.z) < opt.escape_arg || R >= opt.escape_radius_max) {
                const double Rr = R;
                const State e = tr.locate(s, taken * 1.5, [&](cd z) { return Rr - std::abs(z); });
                push(arc, curve, e);
                arc.end_kind = EndKind::Escape;
                arc.escape_radius = std::abs(e.z);
                return arc;
            }
            R = std::min(2 * R, opt.escape_radius_max);
        }
        length += taken;
        s = n;
        h = hs;
        push(arc, curve, s);
    }
}

CriticalGraph build_critical_graph(const SpectralCurve& curve, const TraceOptions& opt)
{
    const auto dirs = critical_directions(curve, curve.z_star);
    std::vector<TrajectoryArc> arcs;
    for (double t : dirs) arcs.push_back(trace(curve, curve.z_star, t, opt));

    CriticalGraph g;
    int pole = 0, axis = 0, esc = 0;
    for (auto& a : arcs) {
        switch (a.end_kind) {
        case EndKind::PolePlus:
            g.gamma2 = a;
            ++pole;
            break;
        case EndKind::AxisCrossing:
            g.gamma_hat_traj = a;
            ++axis;
            break;
        case EndKind::Escape:
            g.escape = a;
            ++esc;
            break;
        default: break;
        }
    }
    if (pole != 1 || axis != 1 || esc != 1) {
        std::ostringstream os;
        os << "build_critical_graph: classification mismatch at lambda = " << curve.lambda << " (";
        for (std::size_t i = 0; i < arcs.size(); ++i) os << (i ? ", " : "") << to_string(arcs[i].end_kind);
        os << ")";
        throw NumericalError(os.str());
    }
    g.gamma1 = reflect(g.gamma2, EndKind::PoleMinus, EndKind::ZeroStarMirror);

    // connecting trajectory: traced half plus its mirror image
    TrajectoryArc half = g.gamma_hat_traj;
    TrajectoryArc mirror = reflect(half, EndKind::AxisCrossing, EndKind::ZeroStarMirror);
    const cd join = half.cum_integral.back();
    for (std::size_t k = 1; k < mirror.points.size(); ++k) {
        half.points.push_back(mirror.points[k]);
        half.cum_integral.push_back(join + mirror.cum_integral[k]);
        half.density.push_back(mirror.density[k]);
    }
    half.end_kind = EndKind::ZeroStarMirror;
    g.gamma_hat_traj = half;

    g.mu_mass_gamma2 = std::abs(g.gamma2.cum_integral.back().imag()) / M_PI;
    g.curve = curve.with_arcs(g.gamma2.points);
    return g;
}

Polyline gamma_hat(const CriticalGraph& g)
{
    const cd zs = g.curve.z_star;
    const cd a = -std::conj(zs);
    const double te = std::arg(g.escape.points[1] - zs);
    const double tl = std::arg(g.gamma_hat_traj.points[1] - zs);
    double span = tl - te;
    while (span < 0) span += 2 * M_PI;
    const double tb = te + span / 2;
    const double cross = g.gamma_hat_traj.points[0].imag();
    double axis_y = cross;
    for (cd p : g.gamma_hat_traj.points)
        if (std::abs(p.real()) < 1e-12) axis_y = p.imag();

    std::vector<Polyline> obstacles = {g.escape.points, g.gamma_hat_traj.points, g.gamma2.points, g.gamma1.points};
    {
        Polyline m;
        for (cd p : g.escape.points) m.push_back(-std::conj(p));
        obstacles.push_back(m);
    }
    std::string why;
    for (double frac : {0.25, 0.5, 0.125, 0.75, 0.0625}) {
        const double d = frac * std::max(zs.real(), 1e-2);
        const cd P = zs + std::polar(d, tb);
        if (P.imag() <= axis_y) {
            why = "corridor below the connecting trajectory";
            continue;
        }
        Polyline gh = {a, -std::conj(P), cd(0, P.imag()), P, zs};
        bool ok = true;
        for (std::size_t i = 0; i + 1 < gh.size() && ok; ++i) {
            // shrink the end pieces so the shared endpoints do not register
            cd p = gh[i], q = gh[i + 1];
            if (i == 0) p += 1e-6 * (q - p);
            if (i + 2 == gh.size()) q -= 1e-6 * (q - p);
            for (const auto& o : obstacles)
                for (std::size_t j = 0; j + 1 < o.size(); ++j)
                    if (segments_intersect(p, q, o[j], o[j + 1])) ok = false;
        }
        if (!ok) {
            why = "crosses a traced arc";
            continue;
        }
        PhiFunction pf(g.curve, gh);
        bool positive = true;
        for (std::size_t i = 0; i + 1 < gh.size() && positive; ++i)
            for (double t : {0.25, 0.5, 0.75}) {
                const cd s = gh[i] + t * (gh[i + 1] - gh[i]);
                if (pf.phi_beside(s, gh, 1).value.real() <= 0) {
                    positive = false;
                    why = "Re phi_+ <= 0 on a sample";
                    break;
                }
            }
        if (positive) return gh;
    }
    throw NumericalError("gamma_hat: no admissible contour (" + why + ")");
}

ZeroDistanceStats zero_distance_stats(const std::vector<cd>& zeros, const CriticalGraph& g, double imaginary_tol)
{
    ZeroDistanceStats st;
    const bool odd = zeros.size() % 2 == 1;
    double sum = 0;
    for (cd z : zeros) {
        if (odd && !st.outlier && std::abs(z.real()) < imaginary_tol) {
            st.outlier = z;
            continue;
        }
        const double d = std::min(polyline_distance(z, g.gamma1.points), polyline_distance(z, g.gamma2.points));
        st.max = std::max(st.max, d);
        sum += d;
        ++st.counted;
    }
    st.mean = st.counted ? sum / st.counted : 0;
    return st;
}

std::vector<double> mu_cdf(const TrajectoryArc& gamma2)
{
    std::vector<double> c;
    const double total = gamma2.cum_integral.back().imag();
    for (cd f : gamma2.cum_integral) c.push_back(f.imag() / total);
    return c;
}

double kolmogorov_distance(const std::vector<cd>& zeros, const CriticalGraph& g, double imaginary_tol)
{
    const auto& arc = g.gamma2;
    const auto s = arc.arclength();
    const auto F = mu_cdf(arc);
    std::vector<double> model;
    for (cd z : zeros) {
        if (z.real() <= 0 || std::abs(z.real()) < imaginary_tol) continue;
        const Projection pr = project_onto(z, arc.points);
        const auto it = std::upper_bound(s.begin(), s.end(), pr.arclength);
        std::size_t i = std::clamp<std::size_t>(it - s.begin(), 1, s.size() - 1);
        const double t = (pr.arclength - s[i - 1]) / (s[i] - s[i - 1]);
        model.push_back(F[i - 1] + std::clamp(t, 0.0, 1.0) * (F[i] - F[i - 1]));
    }
    if (model.empty()) throw ValidationError("kolmogorov_distance: no zeros in the right half plane");
    std::sort(model.begin(), model.end());
    const double n = static_cast<double>(model.size());
    double d = 0;
    for (std::size_t k = 0; k < model.size(); ++k)
        d = std::max({d, (k + 1) / n - model[k], model[k] - k / n});
    return d;
}

void write_arc_csv(std::ostream& os, const TrajectoryArc& arc)
{
    os << "# schema_version=1 kind=trajectory_arc start=" << to_string(arc.start_kind)
       << " end=" << to_string(arc.end_kind) << "\n";
    os << "re,im,cum_integral_im,density\n";
    os << std::setprecision(17);
    for (std::size_t k = 0; k < arc.points.size(); ++k) {
        os << arc.points[k].real() << ',' << arc.points[k].imag() << ',' << arc.cum_integral[k].imag() << ',';
        if (std::isfinite(arc.density[k]))
            os << arc.density[k];
        else
            os << "inf";
        os << '\n';
    }
}

void write_svg(std::ostream& os, const std::vector<SvgLayer>& layers, cd lo, cd hi, const std::string& title)
{
    const double W = 800;
    const double sx = W / (hi.real() - lo.real());
    const double H = sx * (hi.imag() - lo.imag());
    auto X = [&](cd z) { return (z.real() - lo.real()) * sx; };
    auto Y = [&](cd z) { return (hi.imag() - z.imag()) * sx; };
    auto esc = [](const std::string& s) {
        std::string o;
        for (char ch : s) {
            if (ch == '<') o += "&lt;";
            else if (ch == '>') o += "&gt;";
            else if (ch == '&') o += "&amp;";
            else o += ch;
        }
        return o;
    };
    os << std::fixed << std::setprecision(3);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<!-- schema_version=1 -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
       << ' ' << H << "\">\n";
    os << "<title>" << esc(title) << "</title>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const cd o(0, 0);
    if (lo.real() < 0 && hi.real() > 0)
        os << "<line x1=\"" << X(o) << "\" y1=\"0\" x2=\"" << X(o) << "\" y2=\"" << H
           << "\" stroke=\"#ccc\" stroke-width=\"1\"/>\n";
    if (lo.imag() < 0 && hi.imag() > 0)
        os << "<line x1=\"0\" y1=\"" << Y(o) << "\" x2=\"" << W << "\" y2=\"" << Y(o)
           << "\" stroke=\"#ccc\" stroke-width=\"1\"/>\n";
    auto inside = [&](cd z) {
        return z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() && z.imag() <= hi.imag();
    };
    for (const auto& layer : layers) {
        for (const auto& line : layer.lines) {
            os << "<polyline fill=\"none\" stroke=\"" << esc(layer.color) << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (cd p : line) {
                if (!inside(p)) continue;
                os << (first ? "" : " ") << X(p) << ',' << Y(p);
                first = false;
            }
            os << "\"/>\n";
        }
        for (cd p : layer.points)
            if (inside(p))
                os << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"3\" fill=\"" << esc(layer.color)
                   << "\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace kissing
