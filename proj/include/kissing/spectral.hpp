#pragma once

#include <vector>

#include "kissing/contour.hpp"
#include "kissing/geometry.hpp"

namespace kissing {

double lambda_crit();

// -(lambda^2/4)(z - z_l)(z + conj z_l)/(z^2 - 1), z_l = x + 2i/lambda
cd Q(cd z, double lambda, double x);

inline cd z_lambda(double lambda, double x) { return {x, 2.0 / lambda}; }

enum class CutMode { Straight, Arc };

// Straight cuts [z_l, 1] and [-1, -conj z_l] for arbitrary x (the psi setting).
namespace detail {
cd sqrt_q_straight(cd z, double lambda, cd zl);
cd sqrt_q_straight_at(cd base, cd off, double lambda, cd zl);
// + boundary value (left of z_l -> 1) at s on the open right segment
cd sqrt_q_plus_right(cd s, double lambda, cd zl);
cd sqrt_q_plus_right_at(cd base, cd off, double lambda, cd zl);
}  // namespace detail

struct SegmentIntegrals {
    cd left;    // int_{-1}^{-conj z_l} Q_+^{1/2}
    cd middle;  // int_{-conj z_l}^{z_l} Q^{1/2}
    cd right;   // int_{z_l}^{1} Q_+^{1/2}
};
SegmentIntegrals segment_integrals(double lambda, double x);

// Re int_{z_l}^1 Q_+^{1/2} along the straight segment
double psi(double x, double lambda);

class SpectralCurve {
public:
    double lambda = 0;
    double x_star = 0;
    cd z_star;
    double kappa = 0;
    CutMode mode = CutMode::Straight;
    Polyline gamma1;  // -1 -> -conj z_*
    Polyline gamma2;  // z_* -> 1

    cd q(cd z) const { return Q(z, lambda, x_star); }
    // Q(base + off) with each linear factor formed as (base - root) + off
    cd q_at(cd base, cd off) const
    {
        return -(lambda * lambda / 4) * ((base - z_star) + off) * ((base + std::conj(z_star)) + off) /
               (((base - 1.0) + off) * ((base + 1.0) + off));
    }
    // branch ~ -i lambda/2 - 1/z at infinity, cut on gamma1 and gamma2
    cd sqrt_q(cd z) const;
    // same at z = base + off, with the differences to the branch points formed from off directly
    cd sqrt_q_at(cd base, cd off) const;
    // boundary value on gamma_arc (1 or 2); side +1 is the left of the orientation
    cd sqrt_q_side(cd s, int arc, int side) const;
    const Polyline& arc(int j) const { return j == 1 ? gamma1 : gamma2; }

    // replace the straight cuts with a traced gamma2 (z_* -> 1); gamma1 is its mirror image
    SpectralCurve with_arcs(const Polyline& g2) const;

private:
    int arc_parity(cd z, int arc) const;
};

SpectralCurve solve_boutroux(double lambda);

// + boundary values along a path on cut `arc`, continued from i*1e3 through the plane.
BranchTrack<double> q_sqrt_plus(const Polyline& path_on_cut, const SpectralCurve& curve, int arc);

// Unit normal pointing to the + (left) side of a polyline at its point nearest to s.
cd left_normal(const Polyline& line, cd s);

struct PhiValue {
    cd value;      // along the canonical path; defined modulo pi i
    cd canonical;  // Im reduced to (-pi/2, pi/2]
};

class PhiFunction {
public:
    // gamma_hat from -conj z_* to z_*; empty means the straight segment
    explicit PhiFunction(const SpectralCurve& curve, Polyline gamma_hat = {});

    const SpectralCurve& curve() const { return curve_; }
    const Polyline& gamma_hat() const { return gamma_hat_; }
    cd ell() const { return ell_; }
    cd kappa_half() const { return {0, curve_.kappa / 2}; }

    PhiValue phi(cd z) const;
    PhiValue phi_side(cd s, int arc, int side) const;
    // boundary value at s on any polyline (gamma_hat, say); side +1 is the left of its orientation
    PhiValue phi_beside(cd s, const Polyline& line, int side) const;
    cd phi2(cd z) const;
    // int_1^z Q^{1/2} along the canonical path, without the i kappa/2 offset
    cd integral_from_one(cd z) const;

    const std::vector<Path<double>>& obstacles() const { return obstacles_; }

private:
    void check_off_cut(cd z) const;
    cd integrate_from(cd base, cd z, cd anchor_dir) const;
    cd compute_ell() const;

    SpectralCurve curve_;
    Polyline gamma_hat_;
    std::vector<Path<double>> obstacles_;
    cd ell_;
};

cd ell_constant(const PhiFunction& pf);

// l(R) = -i lambda z/2 - log z + i kappa/2 - phi(z) at z = iR, without extrapolation
cd ell_at(const PhiFunction& pf, double R);

}  // namespace kissing
