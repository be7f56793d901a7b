#include <cmath>
#include <vector>

#include "doctest.h"
#include "kissing/parametrix.hpp"
#include "kissing/polynomial.hpp"

using namespace kissing;

namespace {

const cd I(0, 1);

const ParametrixEval& pe3()
{
    static const ParametrixEval pe = ParametrixEval::build(3.0);
    return pe;
}

cd mid_of(const Polyline& p, std::size_t i) { return (p[i] + p[i + 1]) / 2.0; }

// ten midpoints spread along a polyline
std::vector<cd> samples(const Polyline& p)
{
    std::vector<cd> out;
    for (int k = 0; k < 10; ++k) out.push_back(mid_of(p, (p.size() - 1) * (2 * k + 1) / 20));
    return out;
}

}  // namespace

TEST_CASE("parities")
{
    CHECK(parity_nu(0, 1) == 2);
    CHECK(parity_nu(1, 1) == 1);
    CHECK(parity_nu(0, 2) == 1);
    CHECK(parity_nu(1, 2) == 2);
    CHECK(parity_sigma(1) == 2);
    CHECK(parity_sigma(2) == 1);
}

TEST_CASE("eta and N")
{
    const auto& pe = pe3();
    const auto& c = pe.curve();
    const double lam = c.lambda;
    const cd zb = std::conj(c.z_star);
    for (cd z : {cd(2, 2), cd(-0.3, 0.2), cd(0.1, -1.5), cd(-3, 0.5), cd(0, 0.9)}) {
        const cd e = eta(z, pe);
        // eta^2 = (2i/lambda) xi (z + 1)/(z + conj z_*), an algebraic identity on the first sheet
        CHECK(std::abs(e * e - (2.0 * I / lam) * c.sqrt_q(z) * (z + 1.0) / (z + zb)) < 1e-10);
        CHECK(std::abs(N_matrix(z, pe).determinant() - 1.0) < 1e-10);
    }
    CHECK(std::abs(eta(cd(0, 1e4), pe) - 1.0) < 1e-3);
    CHECK((N_matrix(cd(0, 1e3), pe) - Mat2::Identity()).norm() < 1e-2);
    // eta^2 = 1 at y_*, where the off-diagonal entries vanish
    CHECK(std::abs(std::pow(eta(pe.y_star(), pe), 2) - 1.0) < 1e-8);
    CHECK(std::abs(N_matrix(pe.y_star(), pe)(0, 1)) < 1e-8);
    Mat2 J;
    J << 0, 1, -1, 0;
    for (int arc : {1, 2})
        for (cd s : samples(c.arc(arc))) {
            const cd ep = eta_beside(s, c.arc(arc), 1, pe), em = eta_beside(s, c.arc(arc), -1, pe);
            CHECK(std::abs(std::abs(ep / em) - 1) < 1e-8);
            CHECK((N_from_eta(ep) - N_from_eta(em) * J).norm() < 1e-6);
        }
    CHECK_THROWS_AS(eta(c.gamma2[3], pe), ValidationError);
}

TEST_CASE("holomorphic periods")
{
    const auto& pe = pe3();
    const PeriodData m = periods_m(pe);
    CHECK(std::abs(m.mA0.real()) < 1e-8);
    CHECK(std::abs(m.mB0.imag()) < 1e-8);
    CHECK(std::abs(m.mA1.imag()) < 1e-8);
    // the residue of z/(xi (z^2 - 1)) at infinity gives Re m_B1 = pi/lambda, not 0
    CHECK(std::abs(m.mB1.real() - M_PI / 3) < 1e-8);
    CHECK(std::abs(m.mA0) > 0.1);
    CHECK(std::abs(m.mB0) > 0.1);
    const auto& ctx = pe.periods();
    CHECK(std::abs(ctx.b_moment_on_loop(0) - m.mB0) < 1e-9);
    CHECK(std::abs(ctx.b_moment_on_loop(1) - m.mB1) < 1e-9);
    // straight cuts give homologous cycles
    const PeriodContext straight(solve_boutroux(3.0));
    CHECK(std::abs(straight.m().mA0 - m.mA0) < 1e-9);
    CHECK(std::abs(straight.m().mB0 - m.mB0) < 1e-9);
    CHECK(std::abs(straight.m().mB1 - m.mB1) < 1e-9);
    // Legendre-type relation: the loop around both cuts picks up only the residue at infinity
    auto f = [&](cd z) { return z / (pe.curve().sqrt_q(z) * (z * z - 1.0)); };
    const cd big = integrate_contour<double>(f, Path<double>::circle(0, 5, 64), {1e-13, 1e-12, 20000});
    CHECK(std::abs(big - 2.0 * M_PI * I * (2.0 * I / 3.0)) < 1e-9);
}

TEST_CASE("Lambda_a periods")
{
    const auto& pe = pe3();
    for (double tau : {-2.0, 0.3, 1.5, 40.0})
        for (int nu : {1, 2}) {
            const CyclePeriods p = lambda_a_periods(cd(0, tau), nu, pe);
            CHECK(std::abs(p.A.real()) < 1e-8);
            // direct residue count gives (-1)^nu pi/2
            CHECK(std::abs(p.B.imag() - (nu == 2 ? 1 : -1) * M_PI / 2) < 1e-8);
        }
    // the two sheets differ only in the sign of the holomorphic part
    const CyclePeriods p1 = lambda_a_periods(cd(0, 0.7), 1, pe), p2 = lambda_a_periods(cd(0, 0.7), 2, pe);
    CHECK(std::abs(p1.A + p2.A) < 1e-9);
    CHECK(std::abs(p1.B + p2.B) < 1e-9);
    // arc cuts and straight cuts agree
    const PeriodContext straight(solve_boutroux(3.0));
    const CyclePeriods q = lambda_a_periods(cd(0, 0.7), 1, straight);
    CHECK(std::abs(q.A - p1.A) < 1e-9);
    CHECK(std::abs(q.B - p1.B) < 1e-9);
    CHECK_THROWS_AS(lambda_a_periods(cd(0, 1), 3, pe), ValidationError);
}

TEST_CASE("constant c is the limit of Psi_A")
{
    const PeriodContext ctx(solve_boutroux(3.0));
    for (int nu : {1, 2})
        for (int sg : {1, 2}) {
            const double cc = c_constant(ctx, nu, sg);
            for (double tau : {1e6, -1e6}) {
                double d = 2 * M_PI * psi_a(tau, nu, sg, ctx) - cc;
                d -= 2 * M_PI * std::round(d / (2 * M_PI));
                CHECK(std::abs(d) < 1e-4);
            }
        }
}

TEST_CASE("period matching at lambda = 3")
{
    const auto& pe = pe3();
    for (int np : {0, 1})
        for (int k : {1, 2}) {
            const PeriodSolution ps = solve_periods(pe, np, k);
            CHECK(ps.residual_A < 1e-6);
            CHECK(ps.residual_B < 1e-6);
            CHECK(ps.a_star.real() == 0);
            CHECK(ps.theta_proximity > 1e-3);
            const CyclePeriods p = omega_periods(ps.a_star, ps.b_star, ps.periods.parity_nu, ps.periods.parity_sigma,
                                                 pe.periods());
            CHECK(std::abs(p.A.real()) < 1e-8);
        }
    // the degree-n solution tracks the imaginary zero of p_n
    const PeriodSolution s41 = solve_for_degree(pe, 41, 1);
    const auto z41 = zeros_of(monic_op(41, 123)).zeros;
    double y = NAN;
    for (cd z : z41)
        if (std::abs(z.real()) < 1e-8) y = z.imag();
    CHECK(std::abs(s41.a_star.imag() - y) < 1e-2);
    CHECK_THROWS_AS(solve_periods(pe, 2, 1), ValidationError);
}

TEST_CASE("theta scan")
{
    const ThetaScan s = theta_star_scan(2, 10, 16);
    CHECK(s.lambda.size() == 17);
    CHECK(s.max_jump < 2.0);
    CHECK(std::abs(s.lifted.back() - s.lifted.front()) > 1);
    for (double l : s.crossings) {
        double d = two_kappa_minus_c(l);
        d -= 2 * M_PI * std::round(d / (2 * M_PI));
        CHECK(std::abs(d) < 1e-8);
    }
    REQUIRE(!s.crossings.empty());
    CHECK_THROWS_AS(theta_star_scan(10, 2, 4), ValidationError);
    // a_* escapes to infinity at a crossing, then solve_periods refuses
    const double l0 = s.crossings.front();
    const PeriodSolution near = solve_periods(PeriodContext(solve_boutroux(l0 + 0.005)), 1, 1);
    CHECK(std::abs(near.a_star) > 1e2);
    CHECK_THROWS_AS(solve_periods(PeriodContext(solve_boutroux(l0 + 1e-5)), 1, 1), ThetaStarError);
}

TEST_CASE("model problem M")
{
    const auto& pe = pe3();
    const auto& c = pe.curve();
    for (int n : {10, 11}) {
        const ModelSolution ms = model_solution(n, pe);
        for (int arc : {1, 2, 0}) {
            const Polyline& L = arc == 0 ? pe.gamma_hat() : c.arc(arc);
            const Mat2 J = M_jump(arc, n, c.kappa);
            for (cd s : samples(L)) {
                const Mat2 P = M_beside(s, L, 1, ms, pe), Mm = M_beside(s, L, -1, ms, pe);
                CHECK((P - Mm * J).norm() < 1e-6);
            }
        }
        // no jump on the real axis outside [-1, 1]
        for (double x : {-4.0, -1.5, 1.5, 4.0}) {
            const Polyline L{cd(x - 0.1, 0), cd(x + 0.1, 0)};
            CHECK((M_beside(x, L, 1, ms, pe) - M_beside(x, L, -1, ms, pe)).norm() < 1e-8);
        }
        CHECK((M_matrix(cd(0, 1e3), ms, pe) - Mat2::Identity()).norm() < 1e-2);
        CHECK((M_matrix(cd(800, -600), ms, pe) - Mat2::Identity()).norm() < 1e-2);
        CHECK(std::abs(M_matrix(cd(0.4, -0.7), ms, pe).determinant() - 1.0) < 1e-10);
        // u tends to its limit
        CHECK(std::abs(u_value(cd(0, 1e4), 1, n, ms.k1, pe) - u_infinity(1, n, ms.k1, pe)) < 1e-3);
    }
}

TEST_CASE("strong asymptotics against exact polynomials")
{
    const auto& pe = pe3();
    const cd z(2, 2);
    std::vector<double> err_odd;
    for (int n : {10, 20, 40}) {
        const cd s = strong_asymptotic(n, z, pe, solve_for_degree(pe, n, 1));
        CHECK(std::abs(s / monic_op(n, 3.0 * n)(z) - 1.0) < 1e-3);
    }
    for (int n : {11, 21, 41}) {
        const cd s = strong_asymptotic(n, z, pe, solve_for_degree(pe, n, 1));
        err_odd.push_back(std::abs(s / monic_op(n, 3.0 * n)(z) - 1.0));
    }
    CHECK(err_odd[0] < 2e-2);
    CHECK(err_odd[2] < err_odd[0] / 4);

    // another admissible route changes nothing
    const PeriodSolution ps = solve_for_degree(pe, 20, 1);
    const cd a = strong_asymptotic(20, z, pe, ps);
    const cd b = strong_asymptotic(20, z, pe, ps, Polyline{1.0, cd(3, 0), cd(3, 3), z});
    CHECK(std::abs(a / b - 1.0) < 1e-8);
    const cd w(-0.2, -0.8);
    const cd a2 = strong_asymptotic(20, w, pe, ps);
    const cd b2 = strong_asymptotic(20, w, pe, ps, Polyline{1.0, cd(1.2, -1.5), cd(-0.5, -1.5), w});
    CHECK(std::abs(a2 / b2 - 1.0) < 1e-8);

    CHECK_THROWS_AS(strong_asymptotic(21, z, pe, ps), ValidationError);
    CHECK_THROWS_AS(strong_asymptotic(20, pe.curve().gamma2[4], pe, ps), ValidationError);
}

TEST_CASE("Psi_0 has no zeros")
{
    const auto& pe = pe3();
    const PeriodSolution ps = solve_for_degree(pe, 20, 1);
    double lo = INFINITY;
    for (double x = -2.95; x < 3; x += 0.5)
        for (double y = -2.95; y < 3; y += 0.5) lo = std::min(lo, std::abs(psi_amplitude(cd(x, y), ps, pe)));
    CHECK(lo > 1e-2);
}

TEST_CASE("conformal maps")
{
    const auto& pe = pe3();
    const PhiFunction& pf = pe.phi();
    const auto& c = pe.curve();
    // residue of Q at 1 by a limit
    const double h = 1e-7;
    const cd res = h * c.q(1.0 + h);
    const cd slope = (conformal_f_B(1.0 + 1e-4 * I, pf) - conformal_f_B(1.0 - 1e-4 * I, pf)) / (2e-4 * I);
    CHECK(std::abs(slope - res) < 1e-5 * std::abs(res));
    CHECK(std::abs(conformal_f_B(1.0 + 1e-3, pf) / 1e-3 - res) < 1e-2 * std::abs(res));
    // f_B is analytic across gamma2 near 1
    const Polyline& g2 = c.gamma2;
    int seen = 0;
    for (std::size_t i = 0; i + 1 < g2.size(); ++i) {
        const cd s = mid_of(g2, i);
        if (std::abs(s - 1.0) > 0.1 || std::abs(s - 1.0) < 0.02) continue;
        ++seen;
        const cd up = pf.phi_side(s, 2, 1).value - pf.kappa_half(), dn = pf.phi_side(s, 2, -1).value - pf.kappa_half();
        CHECK(std::abs(up * up - dn * dn) < 1e-8);
    }
    CHECK(seen > 0);

    const cd a = -std::conj(c.z_star);
    const cd qp = (c.q(a + 1e-6) - c.q(a - 1e-6)) / 2e-6;
    const cd g0 = f_A_slope(pf);
    CHECK(std::abs(g0 * g0 * g0 - qp) < 1e-6 * std::abs(qp));
    for (double r : {1e-3, 1e-2})
        for (double th : {0.4, 2.0, -1.0}) {
            const cd z = a + std::polar(r, th);
            CHECK(std::abs(conformal_f_A(z, pf) / (z - a) - g0) < 20 * r * std::abs(g0));
        }
    CHECK_THROWS_AS(conformal_f_A(cd(0, 0), pf), ValidationError);
    CHECK_THROWS_AS(conformal_f_B(cd(2, 0), pf), ValidationError);
}

TEST_CASE("u11 jumps and limits")
{
    const auto& pe = pe3();
    for (int n : {20, 21}) {
        const PeriodSolution ps = solve_for_degree(pe, n, 1);
        auto wrapped = [](cd d, double target) {
            const double t = d.imag() - target;
            return std::abs(cd(d.real(), t - 2 * M_PI * std::round(t / (2 * M_PI))));
        };
        const Polyline axis{cd(1.5, 0), cd(4, 0)};
        const cd x(2.5, 0);
        CHECK(wrapped(u_beside(x, axis, 1, 1, n, ps, pe) - u_beside(x, axis, -1, 1, n, ps, pe), 0) < 1e-9);
        const Polyline& gh = pe.gamma_hat();
        const cd s = mid_of(gh, gh.size() / 3);
        CHECK(wrapped(u_beside(s, gh, 1, 1, n, ps, pe) - u_beside(s, gh, -1, 1, n, ps, pe), M_PI * n) < 1e-9);
        // settles at infinity
        const cd u1 = u11(cd(0, 500), ps, pe), u2 = u11(cd(0, 1000), ps, pe), ui = u_infinity(1, n, ps, pe);
        CHECK(std::abs(u2 - ui) < std::abs(u1 - ui));
        CHECK(std::abs(u2 - ui) < 1e-2);
    }
    // Psi_1 vanishes at a_*
    const PeriodSolution odd = solve_for_degree(pe, 21, 1);
    const double e1 = std::abs(psi_amplitude(odd.a_star + 1e-3, odd, pe));
    const double e2 = std::abs(psi_amplitude(odd.a_star + 2e-3, odd, pe));
    CHECK(e2 / e1 == doctest::Approx(2).epsilon(1e-2));
    CHECK_THROWS_AS(u11(cd(2, 2), solve_periods(pe, 0, 2), pe), ValidationError);
}
