#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kissing/trajectories.hpp"

namespace kissing {

using Mat2 = Eigen::Matrix2cd;

// nu = n + k + 1 mod 2 and sigma = k + 1 mod 2, with 0 written as 2
int parity_nu(int n_parity, int k);
int parity_sigma(int k);

struct PeriodData {
    cd mA0, mA1, mB0, mB1;
    double c_const = 0;
    int parity_nu = 2;
    int parity_sigma = 2;
};

struct CyclePeriods {
    cd A;
    cd B;
};

struct PeriodSolution {
    PeriodData periods;
    cd a_star;
    double b_star = 0;
    int n_parity = 0;
    int k = 1;
    int kappa_multiple = 1;      // m in the A target 2 m kappa i
    double theta_proximity = 0;  // distance of 2 m kappa - c to 2 pi Z
    double residual_A = 0;       // |A-period - 2 m kappa i| mod 2 pi i
    double residual_B = 0;       // |B-period - n pi i| mod 2 pi i
};

struct SolveOptions {
    double theta_tolerance = 1e-3;
    double tau_tol = 1e-12;
    // The parametrix for p_n needs m = n: the jumps carry exp(i n kappa), so a_* moves with n.
    int kappa_multiple = 1;
};

// Cycle geometry for one curve, straight or arc cuts. B is a counterclockwise loop around gamma1
// that stays in Re z < 0; A is the segment -conj z_* -> z_* on both sheets.
class PeriodContext {
public:
    explicit PeriodContext(const SpectralCurve& curve);

    const SpectralCurve& curve() const { return curve_; }
    const Polyline& b_loop() const { return b_loop_; }
    cd y_star() const { return y_star_; }
    double lambda() const { return curve_.lambda; }
    // m periods, c fields left at defaults
    const PeriodData& m() const { return m_; }

    // xi on sheet 1 or 2
    cd xi(cd z, int sheet) const;
    // xi(p^(sheet)) (p^2 - 1) for a pole p off the cuts
    cd beta(cd p, int sheet) const;
    // int over the A path of ds/((s - a) xi (s^2 - 1)) on sheet 1
    cd a_kernel(cd a) const;
    // int_{-conj z_*}^{z_*} s^j/(xi (s^2 - 1)) ds and the same over gamma1 with the + boundary value
    cd a_moment(int j) const;
    cd b_moment_on_cut(int j) const;
    // -(1/2) of the loop integral of z^j/(xi (z^2 - 1)), the loop form of b_moment_on_cut
    cd b_moment_on_loop(int j) const;
    // loop integral over B of dz/((z - a) xi (z^2 - 1)) on sheet 1
    cd b_kernel(cd a) const;

private:
    SpectralCurve curve_;
    Polyline b_loop_;
    cd y_star_;
    PeriodData m_;
};

// Loop around gamma1 at distance d, counterclockwise, checked to stay off the arc and off iR.
Polyline b_cycle_loop(const SpectralCurve& curve);

struct ParametrixOptions {
    TraceOptions trace;
    SolveOptions solve;
};

class ParametrixEval {
public:
    explicit ParametrixEval(const CriticalGraph& graph, const ParametrixOptions& opt = {});
    static ParametrixEval build(double lambda, const ParametrixOptions& opt = {});

    const CriticalGraph& graph() const { return graph_; }
    const SpectralCurve& curve() const { return graph_.curve; }
    const PeriodContext& periods() const { return periods_; }
    const PhiFunction& phi() const { return phi_; }
    const Polyline& gamma_hat() const { return phi_.gamma_hat(); }
    cd y_star() const { return periods_.y_star(); }
    const ParametrixOptions& options() const { return opt_; }

    // Route from 1 to z avoiding the cuts, gamma_hat, (-inf, -1] and small discs around `poles`.
    Polyline route_from_one(cd z, const std::vector<cd>& poles = {}) const;
    // Same, ending at the boundary value on `line` at s from `side` (+1 left of its orientation)
    Polyline route_beside(cd s, const Polyline& line, int side, const std::vector<cd>& poles = {}) const;

    cd eta_along(const Polyline& tail) const;

private:
    CriticalGraph graph_;
    PeriodContext periods_;
    PhiFunction phi_;
    ParametrixOptions opt_;
};

cd eta(cd z, const ParametrixEval& pe);
cd eta_beside(cd s, const Polyline& line, int side, const ParametrixEval& pe);
Mat2 N_from_eta(cd eta);
Mat2 N_matrix(cd z, const ParametrixEval& pe);

PeriodData periods_m(const PeriodContext& ctx);
inline PeriodData periods_m(const ParametrixEval& pe) { return periods_m(pe.periods()); }

// A- and B-periods of Lambda_a^(nu)
CyclePeriods lambda_a_periods(cd a, int nu, const PeriodContext& ctx);
inline CyclePeriods lambda_a_periods(cd a, int nu, const ParametrixEval& pe)
{
    return lambda_a_periods(a, nu, pe.periods());
}

double c_constant(const PeriodContext& ctx, int nu, int sigma);
inline double c_constant(const ParametrixEval& pe, int nu, int sigma) { return c_constant(pe.periods(), nu, sigma); }

// A- and B-periods of Omega(a, b; nu, sigma)
CyclePeriods omega_periods(cd a, double b, int nu, int sigma, const PeriodContext& ctx);

// b(tau) that makes Re of the B-period vanish
double b_of_tau(double tau, int nu, int sigma, const PeriodContext& ctx);
// (1 / 2 pi i) times the A-period at (i tau, b(tau)), a real number defined modulo 1
double psi_a(double tau, int nu, int sigma, const PeriodContext& ctx);

PeriodSolution solve_periods(const PeriodContext& ctx, int n_parity, int k, const SolveOptions& opt = {});
inline PeriodSolution solve_periods(const ParametrixEval& pe, int n_parity, int k)
{
    return solve_periods(pe.periods(), n_parity, k, pe.options().solve);
}
// solution entering the parametrix of degree n
PeriodSolution solve_for_degree(const ParametrixEval& pe, int n, int k);

struct ThetaScan {
    std::vector<double> lambda;
    std::vector<double> lifted;     // continuous lift of 2 kappa - c (odd n)
    std::vector<double> crossings;  // lambda where the lift meets 2 pi Z
    double max_jump = 0;            // largest step of the lift between grid points
};

ThetaScan theta_star_scan(double lambda_lo, double lambda_hi, int steps);
// 2 kappa - c for odd n, straight cuts
double two_kappa_minus_c(double lambda);

// u_j^(k) on sheet j, for the solution with parity n and index k; defined modulo 2 pi i
cd u_value(cd z, int sheet, int n, const PeriodSolution& ps, const ParametrixEval& pe);
cd u_beside(cd s, const Polyline& line, int side, int sheet, int n, const PeriodSolution& ps,
            const ParametrixEval& pe);
// limit of u at infinity on the given sheet
cd u_infinity(int sheet, int n, const PeriodSolution& ps, const ParametrixEval& pe);
cd u11(cd z, const PeriodSolution& ps, const ParametrixEval& pe);

// Both solutions (k = 1, 2) for one parity, with the normalizing constants c_k = exp(u_k^(k)(inf)).
struct ModelSolution {
    int n = 0;
    PeriodSolution k1, k2;
    cd log_c1, log_c2;
};
ModelSolution model_solution(int n, const ParametrixEval& pe);
Mat2 M_matrix(cd z, const ModelSolution& ms, const ParametrixEval& pe);
Mat2 M_beside(cd s, const Polyline& line, int side, const ModelSolution& ms, const ParametrixEval& pe);
// jump matrix of M on gamma1 (arc 1), gamma2 (arc 2) or gamma_hat (arc 0)
Mat2 M_jump(int arc, int n, double kappa);

// Psi_j = N11 exp(u - u(inf)), j = n mod 2
cd psi_amplitude(cd z, const PeriodSolution& ps, const ParametrixEval& pe);

// Leading term of p_n^lambda(z). `route` (from 1 to z, off gamma1 and gamma2) replaces the planned path.
cd strong_asymptotic(int n, cd z, const ParametrixEval& pe, const PeriodSolution& ps,
                     const std::optional<Polyline>& route = std::nullopt);

// f_B = (1/4)(-phi + i kappa/2)^2 on |z - 1| <= 0.1, f_A = [3/2 (phi^(2) + i kappa/2)]^(2/3) on |z + conj z_*| <= 0.1
cd conformal_f_B(cd z, const PhiFunction& pf);
cd conformal_f_A(cd z, const PhiFunction& pf);
// f_A'(-conj z_*) of the branch taking gamma1 to the negative axis
cd f_A_slope(const PhiFunction& pf);

}  // namespace kissing
