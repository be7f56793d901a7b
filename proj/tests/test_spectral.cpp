#include <cmath>
#include <vector>

#include "doctest.h"
#include "kissing/spectral.hpp"

using namespace kissing;

namespace {

const cd I1(0, 1);

double psi0_closed(double lambda)
{
    const double r = std::sqrt(4 + lambda * lambda);
    return std::log((2 + r) / lambda) - r / 2;
}

// Q^{1/2} continued from i*1e3 to z along a route that avoids the cuts
cd continued(const SpectralCurve& c, cd z)
{
    const cd start(0, 1e3);
    cd w0 = std::sqrt(c.q(start));
    const cd asym = -I1 * c.lambda / 2.0 - 1.0 / start;
    if (std::abs(-w0 - asym) < std::abs(w0 - asym)) w0 = -w0;
    Path<double> route = plan_path(start, z, {Path<double>(c.gamma1), Path<double>(c.gamma2)});
    auto g = [&c](cd s) { return c.q(s); };
    return continue_branch<double>(g, 2, route, w0).final_value();
}

// remainder of phi_+ + phi_- against a target, modulo pi i
double mod_pi_i(cd v, cd target)
{
    const cd d = v - target;
    const double k = std::round(d.imag() / M_PI);
    return std::abs(d - cd(0, k * M_PI));
}

}  // namespace

TEST_CASE("critical lambda is the zero of psi(0)")
{
    const double lc = lambda_crit();
    CHECK(lc == doctest::Approx(1.3255).epsilon(1e-4));
    CHECK(std::abs(psi0_closed(lc)) < 1e-10);
    CHECK(std::abs(psi(0.0, lc)) < 1e-6);
}

TEST_CASE("Q examples")
{
    CHECK(std::abs(Q(0.0, 2.0, 0.0) - cd(-1, 0)) < 1e-14);
    const double lam = 3.0, x = 0.4;
    CHECK(std::abs(Q(cd(1e6, 1e6), lam, x) + lam * lam / 4) < 1e-5);
    for (cd z : {cd(0.3, 0.2), cd(-2, 1), cd(0.1, -0.7)})
        CHECK(std::abs(std::conj(Q(z, lam, x)) - Q(-std::conj(z), lam, x)) < 1e-12);
    CHECK_THROWS_AS(Q(1.0, lam, x), ValidationError);
    CHECK_THROWS_AS(Q(-1.0, lam, x), ValidationError);
}

TEST_CASE("psi matches the closed form at x = 0")
{
    for (double lam : {2.0, 5.0, 10.0}) {
        CHECK(std::abs(psi(0.0, lam) - psi0_closed(lam)) < 1e-8);
        CHECK(psi(0.0, lam) < 0);
        CHECK(psi(1.0, lam) > 0);
    }
}

TEST_CASE("segment integrals are mirror symmetric")
{
    for (double lam : {1.5, 3.0, 8.0})
        for (double x : {0.0, 0.3, 0.7, 0.95}) {
            auto s = segment_integrals(lam, x);
            CHECK(std::abs(s.left + std::conj(s.right)) < 1e-10);
            CHECK(std::abs(s.middle.real()) < 1e-10);
        }
}

TEST_CASE("Boutroux curve invariants")
{
    double prev = 0;
    for (double lam : {1.4, 2.0, 3.0, 5.0, 10.0, 20.0}) {
        SpectralCurve c = solve_boutroux(lam);
        CHECK(c.x_star > prev);
        CHECK(c.x_star < 1);
        prev = c.x_star;
        CHECK(std::abs(psi(c.x_star, lam)) < 1e-10);
        CHECK(std::abs(c.z_star - cd(c.x_star, 2 / lam)) < 1e-15);
        auto s = segment_integrals(lam, c.x_star);
        CHECK(std::abs(s.right.real()) < 1e-9);
        CHECK(std::abs(s.right - cd(0, M_PI / 2)) < 1e-8);
        CHECK(std::abs(s.left - cd(0, M_PI / 2)) < 1e-8);
        CHECK(c.kappa == doctest::Approx(s.middle.imag()).epsilon(1e-12));
    }
    CHECK(solve_boutroux(3.0).kappa == doctest::Approx(-1.515234).epsilon(1e-5));
}

TEST_CASE("x_* approaches 1 for large lambda and 0 near lambda_c")
{
    const double a = 20 * (1 - solve_boutroux(20).x_star);
    const double b = 80 * (1 - solve_boutroux(80).x_star);
    CHECK(b < a);
    const double near = solve_boutroux(1.326).x_star;
    CHECK(near < 0.05);
    CHECK(near < solve_boutroux(1.33).x_star);
    CHECK(solve_boutroux(1.33).x_star < solve_boutroux(1.35).x_star);
    CHECK_THROWS_AS(solve_boutroux(1.3), ValidationError);
    CHECK_THROWS_AS(solve_boutroux(lambda_crit()), ValidationError);
}

TEST_CASE("branch of Q^(1/2)")
{
    SpectralCurve c = solve_boutroux(2.0);
    const cd far(0, 1e3);
    CHECK(std::abs(c.sqrt_q(far) - (-I1 * c.lambda / 2.0 - 1.0 / far)) < 1e-2 / 1e3);
    for (cd z : {cd(0.1, 0.1), cd(-0.5, 2), cd(0.3, -0.4), cd(2, 0.5)}) {
        CHECK(std::abs(c.sqrt_q(z) * c.sqrt_q(z) - c.q(z)) < 1e-12 * (1 + std::abs(c.q(z))));
        CHECK(std::abs(c.sqrt_q(z) - continued(c, z)) < 1e-10);
        CHECK(std::abs(c.sqrt_q(-std::conj(z)) + std::conj(c.sqrt_q(z))) < 1e-12);
    }
    for (double t : {0.2, 0.5, 0.8}) {
        cd s2 = c.z_star + t * (1.0 - c.z_star);
        CHECK(std::abs(c.sqrt_q_side(s2, 2, 1) + c.sqrt_q_side(s2, 2, -1)) < 1e-12);
        cd s1 = -1.0 + t * (-std::conj(c.z_star) + 1.0);
        CHECK(std::abs(c.sqrt_q_side(s1, 1, 1) + c.sqrt_q_side(s1, 1, -1)) < 1e-12);
    }
}

TEST_CASE("boundary values from continuation agree with the closed-form sides")
{
    // at x = 0 the closed form of psi(0) validates the + side convention
    SpectralCurve c;
    c.lambda = 2.5;
    c.x_star = 0;
    c.z_star = z_lambda(c.lambda, 0);
    c.gamma2 = {c.z_star, 1.0};
    c.gamma1 = {-1.0, -std::conj(c.z_star)};
    Polyline samples;
    for (int k = 1; k < 10; ++k) samples.push_back(c.z_star + 0.1 * k * (1.0 - c.z_star));
    auto track = q_sqrt_plus(samples, c, 2);
    REQUIRE(!track.points.empty());
    for (std::size_t k = 0; k < track.points.size(); ++k)
        CHECK(std::abs(track.values[k] - detail::sqrt_q_plus_right(track.points[k], c.lambda, c.z_star)) < 1e-10);
    CHECK(std::abs(psi(0.0, c.lambda) - psi0_closed(c.lambda)) < 1e-8);

    SpectralCurve b = solve_boutroux(4.0);
    Polyline on1;
    for (int k = 1; k < 6; ++k) on1.push_back(-1.0 + 0.15 * k * (-std::conj(b.z_star) + 1.0));
    auto t1 = q_sqrt_plus(on1, b, 1);
    for (std::size_t k = 0; k < t1.points.size(); ++k)
        CHECK(std::abs(t1.values[k] - b.sqrt_q_side(t1.points[k], 1, 1)) < 1e-10);
}

TEST_CASE("curved cuts move the branch discontinuity")
{
    SpectralCurve c = solve_boutroux(3.0);
    const cd mid = (c.z_star + 1.0) / 2.0;
    const cd n = left_normal(c.gamma2, mid);
    SpectralCurve a = c.with_arcs({c.z_star, mid - 0.1 * n, 1.0});
    CHECK(a.mode == CutMode::Arc);
    CHECK(std::abs(a.gamma1.front() + 1.0) < 1e-15);
    CHECK(std::abs(a.gamma1.back() + std::conj(c.z_star)) < 1e-15);
    // between the chord and the arc the two branches differ by sign
    const cd p = mid - 0.05 * n;
    CHECK(std::abs(a.sqrt_q(p) + c.sqrt_q(p)) < 1e-12);
    CHECK(std::abs(a.sqrt_q(p) - continued(a, p)) < 1e-10);
    const cd q = -std::conj(p);
    CHECK(std::abs(a.sqrt_q(q) - continued(a, q)) < 1e-10);
    const cd far = mid + 0.3 * n;
    CHECK(std::abs(a.sqrt_q(far) - c.sqrt_q(far)) < 1e-12);
}

TEST_CASE("phi: value at 1 and jumps across the cuts")
{
    for (double lam : {2.0, 3.0, 10.0}) {
        SpectralCurve c = solve_boutroux(lam);
        PhiFunction pf(c);
        CHECK(std::abs(pf.phi(1.0).value - cd(0, c.kappa / 2)) < 1e-15);
        const cd mid2 = (c.z_star + 1.0) / 2.0;
        const cd s2 = pf.phi_side(mid2, 2, 1).value + pf.phi_side(mid2, 2, -1).value;
        CHECK(mod_pi_i(s2, cd(0, c.kappa)) < 1e-9);
        const cd mid1 = -std::conj(mid2);
        const cd s1 = pf.phi_side(mid1, 1, 1).value + pf.phi_side(mid1, 1, -1).value;
        CHECK(mod_pi_i(s1, cd(0, -c.kappa)) < 1e-9);
        // real parts are opposite on the two sides
        CHECK(std::abs(pf.phi_side(mid2, 2, 1).value.real() + pf.phi_side(mid2, 2, -1).value.real()) < 1e-9);
        // symmetry under z -> -conj z, modulo pi i
        for (cd z : {cd(0.4, 1.2), cd(1.5, -0.3), cd(0.1, -2.0)})
            CHECK(mod_pi_i(pf.phi(-std::conj(z)).value, std::conj(pf.phi(z).value)) < 1e-9);
        // canonical value has the reduced imaginary part
        const auto v = pf.phi(cd(0.2, -0.5));
        CHECK(v.canonical.imag() > -M_PI / 2);
        CHECK(v.canonical.imag() <= M_PI / 2);
        CHECK(mod_pi_i(v.canonical, v.value) < 1e-12);
    }
}

TEST_CASE("phi derivative is Q^(1/2)")
{
    SpectralCurve c = solve_boutroux(3.0);
    PhiFunction pf(c);
    for (cd z : {cd(0.2, 1.3), cd(-1.5, -0.3), cd(2, 0.2)}) {
        const double h = 1e-4;
        cd d = (pf.phi(z + h).value - pf.phi(z - h).value) / (2 * h);
        CHECK(std::abs(d - c.sqrt_q(z)) < 1e-6);
    }
}

TEST_CASE("phi2 vanishes to order 3/2 at the left branch point")
{
    SpectralCurve c = solve_boutroux(3.0);
    PhiFunction pf(c);
    const cd a = -std::conj(c.z_star);
    CHECK(std::abs(pf.phi2(a) + cd(0, c.kappa / 2)) < 1e-15);
    const cd dir = I1;
    auto f = [&](double r) { return std::abs(pf.phi2(a + r * dir) + cd(0, c.kappa / 2)); };
    const double slope = std::log(f(1e-2) / f(1e-3)) / std::log(10.0);
    CHECK(slope == doctest::Approx(1.5).epsilon(0.05 / 1.5));

    // (phi2 + i kappa/2) = (2/3) h (z - a)^{3/2}, and Q^{1/2} ~ h (z - a)^{1/2} gives h^2 = Q'(a)
    const double lam = c.lambda;
    const cd qprime = -(lam * lam / 4) * (a - c.z_star) / (a * a - 1.0);
    auto h2 = [&](double r) {
        const cd dz = r * dir;
        const cd u = (pf.phi2(a + dz) + cd(0, c.kappa / 2)) / (2.0 / 3.0 * std::pow(dz, 1.5));
        return u * u;
    };
    const cd extrap = 2.0 * h2(1e-4) - h2(2e-4);
    CHECK(std::abs(extrap - qprime) < 1e-4 * std::abs(qprime));
}

TEST_CASE("ell constant")
{
    SpectralCurve c = solve_boutroux(3.0);
    PhiFunction pf(c);
    const cd l = pf.ell();
    CHECK(l.imag() == doctest::Approx(c.kappa / 2).epsilon(1e-8));
    auto rich = [&](double R) { return 2.0 * ell_at(pf, 2 * R) - ell_at(pf, R); };
    CHECK(std::abs(rich(1e3) - rich(2e3)) < 1e-6);
    for (double R : {1e3, 4e3}) CHECK(std::abs(ell_at(pf, R) - l) < 10 / R);
    CHECK(std::abs(ell_constant(pf) - l) < 1e-12);
}
