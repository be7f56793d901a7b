#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "kissing/polynomial.hpp"

namespace kissing {

// 2n-point rule for int_{-1}^1 f(x) e^{i omega x} dx on the zeros of p_{2n}^omega.
struct QuadratureRule {
    double omega = 0;
    int n_half = 0;
    std::vector<cd> nodes;
    std::vector<cd> weights;
    // the same at `digits` working precision
    std::vector<cplx<Extended>> nodes_ext, weights_ext;
    unsigned digits = 0;
    double cond = 1;  // conditioning of p_{2n}^omega's defining system
};

struct RuleOptions {
    PolyOptions poly{Precision::Extended};
    // weights from sum_j w_j x_j^k = m_k (moments) or from int p/((x - x_j) p'(x_j)) (interpolatory)
    bool interpolatory = false;
};

QuadratureRule build_rule(int n_half, double omega, const RuleOptions& opt = {});

using Integrand = std::function<cd(cd)>;
cd apply_rule(const QuadratureRule& rule, const Integrand& f);
// extended-precision version, f evaluated at the rule's digits
cplx<Extended> apply_rule(const QuadratureRule& rule, const std::function<cplx<Extended>(const cplx<Extended>&)>& f);

// int_{-1}^1 f e^{i omega x} dx; for omega >= 10 the path is pushed into the upper half-plane
// (f must be analytic on [-1, 1] x [0, 40/omega]).
cd oscillatory_integral(const Integrand& f, double omega, double tol = 1e-15);

// Gauss-Legendre rule with m nodes (Golub-Welsch), used as the non-oscillatory control.
struct LegendreRule {
    std::vector<double> nodes, weights;
};
LegendreRule gauss_legendre(int m);
cd apply_legendre(const LegendreRule& rule, const Integrand& f, double omega);

struct OrderPoint {
    double omega;
    double abs_error;
};

struct OrderFit {
    double slope = 0;
    double intercept = 0;
    std::vector<OrderPoint> points;
    std::vector<double> skipped;  // omega where the rule was ill-conditioned or failed
};

// Least-squares slope of log|error| against log omega. Points whose p_{2n} conditioning
// exceeds skip_condition are skipped.
OrderFit order_fit(int n_half, const Integrand& f, const std::vector<double>& omega_grid,
                   double skip_condition = 1e8);
// the same for the 2n-point Gauss-Legendre rule
OrderFit legendre_order_fit(int n_half, const Integrand& f, const std::vector<double>& omega_grid);

std::vector<double> log_grid(double lo, double hi, int count);

void write_rule_json(std::ostream& os, const QuadratureRule& rule);

}  // namespace kissing
