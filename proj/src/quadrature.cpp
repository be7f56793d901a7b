#include "kissing/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "kissing/contour.hpp"
#include "kissing/moments.hpp"

namespace kissing {

namespace {

using CE = cplx<Extended>;
using MatE = Eigen::Matrix<CE, Eigen::Dynamic, Eigen::Dynamic>;
using VecE = Eigen::Matrix<CE, Eigen::Dynamic, 1>;

// transposed Vandermonde system sum_j w_j x_j^k = m_k
std::vector<CE> moment_weights(const std::vector<CE>& x, const std::vector<CE>& m)
{
    const int N = static_cast<int>(x.size());
    MatE V(N, N);
    VecE rhs(N);
    for (int j = 0; j < N; ++j) {
        CE p(1);
        for (int k = 0; k < N; ++k) {
            V(k, j) = p;
            p *= x[j];
        }
    }
    for (int k = 0; k < N; ++k) rhs(k) = m[k];
    const VecE w = V.fullPivLu().solve(rhs);
    const Extended res = (V * w - rhs).cwiseAbs().maxCoeff();
    if (!(res < Extended(1e-20) * (rhs.cwiseAbs().maxCoeff() + 1)))
        throw NumericalError("build_rule: weight system is singular", to_double(res));
    return {w.data(), w.data() + N};
}

// w_j = int p(x)/((x - x_j) p'(x_j)) e^{i omega x} dx by synthetic division
std::vector<CE> interpolatory_weights(const std::vector<CE>& x, const std::vector<CE>& coeffs,
                                      const std::vector<CE>& m)
{
    const int N = static_cast<int>(x.size());
    std::vector<CE> w(N);
    for (int j = 0; j < N; ++j) {
        std::vector<CE> q(N);  // p/(x - x_j), degree N - 1
        CE carry = coeffs[N];
        for (int k = N - 1; k >= 0; --k) {
            q[k] = carry;
            carry = coeffs[k] + carry * x[j];
        }
        CE dp(0), s(0);
        for (int k = N - 1; k >= 0; --k) dp = dp * x[j] + q[k];
        for (int k = 0; k < N; ++k) s += q[k] * m[k];
        w[j] = s / dp;
    }
    return w;
}

}  // namespace

QuadratureRule build_rule(int n_half, double omega, const RuleOptions& opt)
{
    if (n_half < 1) throw ValidationError("build_rule: n_half must be at least 1");
    if (!std::isfinite(omega)) throw ValidationError("build_rule: omega must be finite");
    const ComplexPolynomial p = monic_op(2 * n_half, omega, opt.poly);
    QuadratureRule r;
    r.omega = omega;
    r.n_half = n_half;
    r.cond = p.cond;
    r.digits = std::max(p.eval_digits(), 40u);
    const std::vector<CE> x = zeros_of_extended(p);
    DigitsGuard guard(r.digits);
    std::vector<CE> xs, coeffs;
    for (const auto& v : x) xs.emplace_back(Extended(v.real()), Extended(v.imag()));
    for (const auto& v : p.coeffs_ext) coeffs.emplace_back(Extended(v.real()), Extended(v.imag()));
    const auto m = detail::raw_moments<Extended>(Extended(omega), 2 * n_half);
    r.nodes_ext = xs;
    r.weights_ext = opt.interpolatory ? interpolatory_weights(xs, coeffs, m) : moment_weights(xs, m);
    for (const auto& v : r.nodes_ext) r.nodes.push_back(to_cd(v));
    for (const auto& v : r.weights_ext) r.weights.push_back(to_cd(v));
    return r;
}

cd apply_rule(const QuadratureRule& rule, const Integrand& f)
{
    cd s = 0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) s += rule.weights[j] * f(rule.nodes[j]);
    return s;
}

cplx<Extended> apply_rule(const QuadratureRule& rule, const std::function<cplx<Extended>(const cplx<Extended>&)>& f)
{
    DigitsGuard guard(rule.digits);
    CE s(0);
    for (std::size_t j = 0; j < rule.nodes_ext.size(); ++j) s += rule.weights_ext[j] * f(rule.nodes_ext[j]);
    return s;
}

cd oscillatory_integral(const Integrand& f, double omega, double tol)
{
    const cd I(0, 1);
    auto g = [&](cd z) { return f(z) * std::exp(I * omega * z); };
    IntegrationOptions o;
    o.abs_tol = tol * 1e-3;
    o.rel_tol = tol;
    o.max_panels = 40000;
    if (std::abs(omega) < 10) return integrate_contour<double>(g, Path<double>::segment(-1, 1), o);
    // e^{i omega z} decays like e^{-40} at height 40/|omega|, on the side where it decays
    const double h = std::copysign(40.0 / std::abs(omega), omega);
    const Path<double> path({cd(-1, 0), cd(-1, h), cd(1, h), cd(1, 0)});
    return integrate_contour<double>(g, path, o);
}

LegendreRule gauss_legendre(int m)
{
    if (m < 1) throw ValidationError("gauss_legendre: need at least one node");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (int k = 1; k < m; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    LegendreRule r;
    for (int k = 0; k < m; ++k) {
        r.nodes.push_back(es.eigenvalues()(k));
        r.weights.push_back(2 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
    }
    return r;
}

cd apply_legendre(const LegendreRule& rule, const Integrand& f, double omega)
{
    cd s = 0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
        s += rule.weights[j] * f(rule.nodes[j]) * std::exp(cd(0, omega * rule.nodes[j]));
    return s;
}

namespace {

OrderFit fit(std::vector<OrderPoint> pts, std::vector<double> skipped)
{
    OrderFit out;
    out.points = std::move(pts);
    out.skipped = std::move(skipped);
    const std::size_t n = out.points.size();
    if (n < 2) throw NumericalError("order_fit: fewer than two usable frequencies", double(n));
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        A(i, 0) = std::log(out.points[i].omega);
        A(i, 1) = 1;
        b(i) = std::log(out.points[i].abs_error);
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    out.slope = c(0);
    out.intercept = c(1);
    return out;
}

}  // namespace

OrderFit order_fit(int n_half, const Integrand& f, const std::vector<double>& omega_grid, double skip_condition)
{
    std::vector<OrderPoint> pts;
    std::vector<double> skipped;
    for (double w : omega_grid) {
        try {
            if (existence_condition(2 * n_half, w) > skip_condition) {
                skipped.push_back(w);
                continue;
            }
            const QuadratureRule r = build_rule(n_half, w);
            const double e = std::abs(apply_rule(r, f) - oscillatory_integral(f, w));
            if (!(e > 0)) {
                skipped.push_back(w);
                continue;
            }
            pts.push_back({w, e});
        } catch (const NumericalError&) {
            skipped.push_back(w);
        }
    }
    return fit(std::move(pts), std::move(skipped));
}

OrderFit legendre_order_fit(int n_half, const Integrand& f, const std::vector<double>& omega_grid)
{
    const LegendreRule r = gauss_legendre(2 * n_half);
    std::vector<OrderPoint> pts;
    for (double w : omega_grid) pts.push_back({w, std::abs(apply_legendre(r, f, w) - oscillatory_integral(f, w))});
    return fit(std::move(pts), {});
}

std::vector<double> log_grid(double lo, double hi, int count)
{
    if (!(lo > 0) || !(hi > lo) || count < 2) throw ValidationError("log_grid: need 0 < lo < hi and count >= 2");
    std::vector<double> g;
    for (int i = 0; i < count; ++i) g.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
    return g;
}

void write_rule_json(std::ostream& os, const QuadratureRule& rule)
{
    using nlohmann::ordered_json;
    auto dec = [](const Extended& x) { return x.str(25); };
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "quadrature_rule";
    j["omega"] = rule.omega;
    j["n_half"] = rule.n_half;
    j["digits"] = rule.digits;
    j["cond"] = rule.cond;
    ordered_json nodes = ordered_json::array(), weights = ordered_json::array();
    {
        DigitsGuard guard(rule.digits);
        for (const auto& v : rule.nodes_ext) nodes.push_back({dec(v.real()), dec(v.imag())});
        for (const auto& v : rule.weights_ext) weights.push_back({dec(v.real()), dec(v.imag())});
    }
    j["nodes"] = nodes;
    j["weights"] = weights;
    os << j.dump(2) << '\n';
}

}  // namespace kissing
