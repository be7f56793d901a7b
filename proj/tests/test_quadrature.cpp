#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kissing/moments.hpp"
#include "kissing/quadrature.hpp"

using namespace kissing;

namespace {

cd ez(cd z) { return std::exp(z); }

}  // namespace

TEST_CASE("two-point rule near omega = 0 is Gauss-Legendre")
{
    const QuadratureRule r = build_rule(1, 1e-4);
    REQUIRE(r.nodes.size() == 2);
    const double g = 1 / std::sqrt(3.0);
    CHECK(std::abs(r.nodes[0] + g) < 1e-3);
    CHECK(std::abs(r.nodes[1] - g) < 1e-3);
    for (cd w : r.weights) CHECK(std::abs(w - 1.0) < 1e-3);
    const LegendreRule gl = gauss_legendre(2);
    CHECK(gl.nodes[1] == doctest::Approx(g).epsilon(1e-14));
    CHECK(gl.weights[0] == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("exactness")
{
    const auto m = moments<double>(5.0, 12);
    const QuadratureRule r1 = build_rule(1, 5);
    CHECK(std::abs(apply_rule(r1, [](cd z) { return z * z; }) - m.raw[2]) < 1e-10);
    const QuadratureRule r2 = build_rule(2, 5);
    // 2n nodes, exact up to degree 4n - 1
    for (int k = 0; k <= 7; ++k) CHECK(std::abs(apply_rule(r2, [k](cd z) { return std::pow(z, k); }) - m.raw[k]) < 1e-8);
    CHECK(std::abs(apply_rule(r2, [](cd z) { return std::pow(z, 8); }) - m.raw[8]) > 1e-6);
    CHECK(std::abs(apply_rule(r2, [](cd) { return cd(1); }) - m.raw[0]) < 1e-14);

    // extended application against extended moments
    const QuadratureRule r3 = build_rule(3, 40);
    DigitsGuard guard(r3.digits);
    const auto me = moments<Extended>(Extended(40), 12);
    for (int k = 0; k <= 11; ++k) {
        const auto s = apply_rule(r3, std::function<cplx<Extended>(const cplx<Extended>&)>(
                                          [k](const cplx<Extended>& z) { return pow(z, k); }));
        CHECK(to_double(abs(s - me.raw[k])) < 1e-25);
    }
}

TEST_CASE("symmetry and the interpolatory cross-check")
{
    for (double w : {5.0, 30.0, 80.0})
        for (int nh : {1, 2, 3}) {
            const QuadratureRule a = build_rule(nh, w);
            RuleOptions o;
            o.interpolatory = true;
            const QuadratureRule b = build_rule(nh, w, o);
            const std::size_t N = a.nodes.size();
            for (std::size_t j = 0; j < N; ++j) {
                CHECK(std::abs(a.weights[j] - b.weights[j]) < 1e-8 * (1 + std::abs(a.weights[j])));
                // z -> -conj z maps the node set to itself and conjugates weights
                double best = INFINITY;
                std::size_t k = 0;
                for (std::size_t i = 0; i < N; ++i)
                    if (std::abs(a.nodes[i] + std::conj(a.nodes[j])) < best) {
                        best = std::abs(a.nodes[i] + std::conj(a.nodes[j]));
                        k = i;
                    }
                CHECK(best < 1e-10);
                CHECK(std::abs(a.weights[k] - std::conj(a.weights[j])) < 1e-10 * (1 + std::abs(a.weights[j])));
            }
        }
}

TEST_CASE("oracle")
{
    // closed form int e^{(1 + i w) x} dx
    for (double w : {0.5, 20.0, 150.0}) {
        const cd s(1, w);
        const cd exact = (std::exp(s) - std::exp(-s)) / s;
        CHECK(std::abs(oscillatory_integral(ez, w) - exact) < 1e-15 * std::abs(exact) + 1e-17);
    }
    const QuadratureRule r = build_rule(2, 20);
    const cd s(1, 20);
    const double err = std::abs(apply_rule(r, ez) - (std::exp(s) - std::exp(-s)) / s);
    CHECK(err < 1e-7);
    CHECK(err > 1e-14);
}

TEST_CASE("error decreases with n at omega = 30")
{
    const cd exact = oscillatory_integral(ez, 30);
    double prev = INFINITY;
    for (int nh : {1, 2, 3}) {
        const double e = std::abs(apply_rule(build_rule(nh, 30), ez) - exact);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("order fits")
{
    const auto grid = log_grid(20, 200, 12);
    const OrderFit f1 = order_fit(1, ez, grid);
    CHECK(f1.slope == doctest::Approx(-3).epsilon(0.1));
    const OrderFit f2 = order_fit(2, ez, grid);
    CHECK(f2.slope == doctest::Approx(-5).epsilon(0.06));
    const OrderFit pole = order_fit(2, [](cd z) { return 1.0 / (z - 3.0); }, grid);
    CHECK(pole.slope == doctest::Approx(-5).epsilon(0.06));
    // a fixed Legendre rule does not decay at all
    const OrderFit gl = legendre_order_fit(2, ez, grid);
    CHECK(std::abs(gl.slope) < 1);
    CHECK_THROWS_AS(log_grid(0, 1, 4), ValidationError);
}

TEST_CASE("rule json")
{
    std::ostringstream os;
    write_rule_json(os, build_rule(1, 5));
    const std::string s = os.str();
    CHECK(s.find("\"schema_version\": 1") != std::string::npos);
    CHECK(s.find("\"nodes\"") != std::string::npos);
    std::ostringstream again;
    write_rule_json(again, build_rule(1, 5));
    CHECK(again.str() == s);
    CHECK_THROWS_AS(build_rule(0, 5), ValidationError);
}
