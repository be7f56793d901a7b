#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "kissing/polynomial.hpp"
#include "kissing/trajectories.hpp"

using namespace kissing;

namespace {

// Re int Q^{1/2} along a polyline, branch carried by continuity; independent of the tracer.
// Pole endpoints are skipped.
double max_real_part_along(const SpectralCurve& c, const Polyline& line)
{
    std::size_t first = 0, last = line.size() - 1;
    if (std::abs(std::abs(line[first].real()) - 1) == 0 && line[first].imag() == 0) ++first;
    if (std::abs(std::abs(line[last].real()) - 1) == 0 && line[last].imag() == 0) --last;
    cd w = std::sqrt(c.q(line[first + 1]));
    cd F = 0;
    double worst = 0;
    for (std::size_t i = first + 1; i < last; ++i) {
        auto f = [&](cd s) {
            cd r = std::sqrt(c.q(s));
            return std::abs(r - w) <= std::abs(r + w) ? r : -r;
        };
        F += integrate_contour<double>(f, Path<double>::segment(line[i], line[i + 1]), {1e-14, 1e-12, 4000});
        w = f(line[i + 1]);
        worst = std::max(worst, std::abs(F.real()));
    }
    return worst;
}

}  // namespace

TEST_CASE("critical directions")
{
    auto a = critical_directions(cd(1, 0));
    CHECK(a[0] == doctest::Approx(M_PI / 3));
    CHECK(a[1] == doctest::Approx(M_PI));
    CHECK(a[2] == doctest::Approx(5 * M_PI / 3));
    auto b = critical_directions(cd(-1, 0));
    CHECK(b[0] == doctest::Approx(0).epsilon(1e-15));
    CHECK(b[1] == doctest::Approx(2 * M_PI / 3));
    CHECK(b[2] == doctest::Approx(4 * M_PI / 3));
    CHECK_THROWS_AS(critical_directions(cd(0, 0)), ValidationError);

    SpectralCurve c = solve_boutroux(3.0);
    auto t = critical_directions(c, c.z_star);
    CHECK(std::abs(t[1] - t[0] - 2 * M_PI / 3) < 1e-10);
    CHECK(std::abs(t[2] - t[1] - 2 * M_PI / 3) < 1e-10);
    // -Q dz^2 > 0 along each direction
    for (double th : t) {
        const cd d = std::polar(1e-6, th);
        const cd v = -c.q(c.z_star + d) * d * d;
        CHECK(std::abs(v.imag()) < 1e-3 * std::abs(v));
        CHECK(v.real() > 0);
    }
    CHECK_THROWS_AS(critical_directions(c, cd(0.3, 0.3)), ValidationError);
}

TEST_CASE("trace at lambda = 3")
{
    SpectralCurve c = solve_boutroux(3.0);
    auto t = critical_directions(c, c.z_star);
    int pole = 0, axis = 0, esc = 0;
    for (double th : t) {
        TrajectoryArc a = trace(c, c.z_star, th);
        CHECK(a.start_kind == EndKind::ZeroStar);
        CHECK(a.max_real_residual() < 1e-8);
        CHECK(a.points.size() == a.cum_integral.size());
        if (a.end_kind == EndKind::PolePlus) {
            ++pole;
            CHECK(a.points.back() == cd(1, 0));
            CHECK(a.end_distance < 1e-6);
        } else if (a.end_kind == EndKind::AxisCrossing) {
            ++axis;
            CHECK(a.points.back().real() == 0);
            CHECK(a.points[a.points.size() - 2].real() > 0);
        } else if (a.end_kind == EndKind::Escape) {
            ++esc;
            CHECK(std::abs(std::arg(a.points.back())) < 0.05);
            CHECK(a.escape_radius >= 50);
        }
        // independent recheck of the trajectory condition
        CHECK(max_real_part_along(c, a.points) < 1e-8);
    }
    CHECK(pole == 1);
    CHECK(axis == 1);
    CHECK(esc == 1);
}

TEST_CASE("trace refuses to run past the arc-length cap")
{
    SpectralCurve c = solve_boutroux(3.0);
    TraceOptions o;
    o.length_cap = 0.1;
    const auto t = critical_directions(c, c.z_star);
    bool threw = false;
    for (double th : t) {
        try {
            trace(c, c.z_star, th, o);
        } catch (const TraceError& e) {
            threw = true;
            CHECK(!e.partial().points.empty());
        }
    }
    CHECK(threw);
}

TEST_CASE("critical graph for lambda = 2, 5, 10")
{
    for (double lam : {2.0, 5.0, 10.0}) {
        SpectralCurve c = solve_boutroux(lam);
        CriticalGraph g = build_critical_graph(c);
        CHECK(g.gamma2.end_kind == EndKind::PolePlus);
        CHECK(g.gamma2.end_distance < 1e-6);
        CHECK(g.escape.end_kind == EndKind::Escape);
        CHECK(std::abs(std::arg(g.escape.points.back())) < 0.05);
        CHECK(g.gamma_hat_traj.end_kind == EndKind::ZeroStarMirror);
        CHECK(std::abs(g.gamma_hat_traj.points.back() + std::conj(c.z_star)) < 1e-15);
        CHECK(std::abs(g.mu_mass_gamma2 - 0.5) < 1e-5);
        for (std::size_t k = 1; k + 1 < g.gamma2.density.size(); ++k) CHECK(g.gamma2.density[k] > 0);
        // gamma1 mirrors gamma2
        const std::size_t n = g.gamma2.points.size();
        REQUIRE(g.gamma1.points.size() == n);
        double dev = 0;
        for (std::size_t k = 0; k < n; ++k)
            dev = std::max(dev, std::abs(g.gamma1.points[k] + std::conj(g.gamma2.points[n - 1 - k])));
        CHECK(dev < 1e-15);
        CHECK(g.gamma1.points.front() == cd(-1, 0));
        // reflected arc is a trajectory too
        CHECK(max_real_part_along(c, g.gamma1.points) < 1e-8);
        CHECK(g.gamma1.max_real_residual() < 1e-8);
        CHECK(g.curve.mode == CutMode::Arc);

        // halved steps
        TraceOptions fine;
        fine.max_step /= 2;
        fine.tol /= 32;
        CriticalGraph h = build_critical_graph(c, fine);
        CHECK(std::abs(h.gamma_hat_traj.points[0] - g.gamma_hat_traj.points[0]) == 0);
        auto axis_point = [](const TrajectoryArc& a) {
            for (cd p : a.points)
                if (p.real() == 0) return p;
            return cd(NAN, NAN);
        };
        CHECK(std::abs(axis_point(h.gamma_hat_traj) - axis_point(g.gamma_hat_traj)) < 1e-6);
        CHECK(std::abs(h.escape.points.back() - g.escape.points.back()) < 1e-6);
        CHECK(h.gamma2.end_distance < 1e-6);
        CHECK(std::abs(h.mu_mass_gamma2 - g.mu_mass_gamma2) < 1e-8);
    }
}

TEST_CASE("Re phi is negative beside the traced cuts")
{
    for (double lam : {1.4, 3.0}) {
        CriticalGraph g = build_critical_graph(solve_boutroux(lam));
        PhiFunction pf(g.curve);
        const auto& p2 = g.curve.gamma2;
        const cd mid = p2[p2.size() / 2];
        for (int side : {1, -1}) {
            const cd z = mid + double(side) * 1e-2 * left_normal(p2, mid);
            CHECK(pf.phi(z).value.real() < 0);
            CHECK(pf.phi(-std::conj(z)).value.real() < 0);
        }
        // jumps stay the same in arc mode
        const cd s2 = pf.phi_side(mid, 2, 1).value + pf.phi_side(mid, 2, -1).value;
        const double k = std::round((s2.imag() - g.curve.kappa) / M_PI);
        CHECK(std::abs(s2 - cd(0, g.curve.kappa + k * M_PI)) < 1e-9);
    }
}

TEST_CASE("gamma hat")
{
    SpectralCurve c = solve_boutroux(3.0);
    CriticalGraph g = build_critical_graph(c);
    Polyline gh = gamma_hat(g);
    CHECK(gh.front() == -std::conj(c.z_star));
    CHECK(gh.back() == c.z_star);
    for (std::size_t k = 0; k < gh.size(); ++k) CHECK(std::abs(gh[k] + std::conj(gh[gh.size() - 1 - k])) < 1e-8);
    PhiFunction pf(g.curve, gh);
    for (std::size_t i = 0; i + 1 < gh.size(); ++i)
        for (double t : {0.1, 0.3, 0.6, 0.9}) {
            const cd s = gh[i] + t * (gh[i + 1] - gh[i]);
            CHECK(pf.phi_beside(s, gh, 1).value.real() > 0);
        }
    // above the connecting trajectory at the imaginary axis
    double y = 0;
    for (cd p : g.gamma_hat_traj.points)
        if (p.real() == 0) y = p.imag();
    for (cd p : gh)
        if (p.real() == 0) CHECK(p.imag() > y);
}

TEST_CASE("zero distance statistics")
{
    SpectralCurve c = solve_boutroux(3.0);
    CriticalGraph g = build_critical_graph(c);
    std::vector<cd> on;
    for (std::size_t k = 0; k < g.gamma2.points.size(); k += 5) on.push_back(g.gamma2.points[k]);
    if (on.size() % 2) on.pop_back();
    auto st = zero_distance_stats(on, g);
    CHECK(st.max < 1e-15);
    CHECK(!st.outlier);

    auto z20 = zeros_of(monic_op(20, 60)).zeros;
    auto z40 = zeros_of(monic_op(40, 120)).zeros;
    auto s20 = zero_distance_stats(z20, g), s40 = zero_distance_stats(z40, g);
    CHECK(s40.max < s20.max);
    CHECK(s40.counted == 40);
    CHECK(kolmogorov_distance(z40, g) <= 0.15);

    auto z41 = zeros_of(monic_op(41, 123)).zeros;
    auto s41 = zero_distance_stats(z41, g);
    REQUIRE(s41.outlier);
    CHECK(std::abs(s41.outlier->real()) < 1e-8);
    CHECK(s41.counted == 40);
    int imaginary = 0;
    for (cd z : z41)
        if (std::abs(z.real()) < 1e-8) ++imaginary;
    CHECK(imaginary == 1);
}

TEST_CASE("mu cdf and exports")
{
    CriticalGraph g = build_critical_graph(solve_boutroux(5.0));
    auto F = mu_cdf(g.gamma2);
    CHECK(F.front() == 0);
    CHECK(F.back() == doctest::Approx(1.0));
    for (std::size_t k = 1; k < F.size(); ++k) CHECK(F[k] > F[k - 1]);

    std::ostringstream csv;
    write_arc_csv(csv, g.gamma2);
    const std::string s = csv.str();
    CHECK(s.rfind("# schema_version=1", 0) == 0);
    CHECK(s.find("re,im,cum_integral_im,density\n") != std::string::npos);
    CHECK(s.find("inf\n") != std::string::npos);

    std::ostringstream svg;
    write_svg(svg, {{{g.gamma2.points, g.gamma1.points}, {cd(0.5, 0.1)}, "#c00"}}, cd(-1.5, -1), cd(1.5, 1), "a<b");
    const std::string v = svg.str();
    CHECK(v.find("<svg") != std::string::npos);
    CHECK(v.find("a&lt;b") != std::string::npos);
    CHECK(v.find("</svg>") != std::string::npos);
}
