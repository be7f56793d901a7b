#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kissing/spectral.hpp"

namespace kissing {

enum class EndKind { ZeroStar, ZeroStarMirror, PolePlus, PoleMinus, AxisCrossing, Escape, Regular };
std::string to_string(EndKind k);

// Polyline along a trajectory of -Q dz^2; cum_integral[k] = int_{points[0]}^{points[k]} Q^{1/2},
// branch taken so that the imaginary part grows along the arc.
struct TrajectoryArc {
    Polyline points;
    std::vector<cd> cum_integral;
    std::vector<double> density;  // |Q^{1/2}|/pi; infinite at a pole endpoint
    EndKind start_kind = EndKind::Regular;
    EndKind end_kind = EndKind::Regular;
    double end_distance = 0;   // pole capture: distance to the pole before the endpoint was snapped
    double escape_radius = 0;  // escape: |z| at which tracing stopped

    double max_real_residual() const;
    double max_step() const;
    double length() const;
    // cumulative arc length at each vertex
    std::vector<double> arclength() const;
};

struct TraceOptions {
    double seed_offset = 1e-4;  // relative to |z_*|
    double max_step = 0.02;     // scaled by max(1, |z|)
    double tol = 1e-10;         // local RK error per step
    double capture_radius = 1e-4;
    double polish_radius = 1e-7;
    double escape_radius = 50;
    double escape_arg = 0.05;  // escape stops only once the angle to the real axis is below this
    double escape_radius_max = 2e3;
    double length_cap = 200;
};

class TraceError : public NumericalError {
public:
    TraceError(const std::string& what, TrajectoryArc partial)
        : NumericalError(what), partial_(std::move(partial))
    {
    }
    const TrajectoryArc& partial() const { return partial_; }

private:
    TrajectoryArc partial_;
};

// The three theta with arg Q'(p) + 3 theta = pi (mod 2 pi), sorted in [0, 2 pi).
std::array<double, 3> critical_directions(cd q_prime);
std::array<double, 3> critical_directions(const SpectralCurve& curve, cd p);

// From a simple zero of Q the arc is seeded at distance seed_offset*|z_*| along `direction`;
// from a regular point it starts there, heading as close to `direction` as the field allows.
TrajectoryArc trace(const SpectralCurve& curve, cd start, double direction, const TraceOptions& opt = {});

struct CriticalGraph {
    SpectralCurve curve;  // arc mode, cut along the traced gamma1, gamma2
    TrajectoryArc gamma2;          // z_* -> 1
    TrajectoryArc gamma1;          // -1 -> -conj z_*
    TrajectoryArc gamma_hat_traj;  // z_* -> -conj z_*
    TrajectoryArc escape;          // z_* -> infinity
    double mu_mass_gamma2 = 0;
};

CriticalGraph build_critical_graph(const SpectralCurve& curve, const TraceOptions& opt = {});

// Contour from -conj z_* to z_* above the connecting trajectory, checked by Re phi_+ > 0.
Polyline gamma_hat(const CriticalGraph& graph);

struct ZeroDistanceStats {
    double max = 0;
    double mean = 0;
    int counted = 0;
    std::optional<cd> outlier;  // a zero with |Re| below the tolerance, odd count only
};

ZeroDistanceStats zero_distance_stats(const std::vector<cd>& zeros, const CriticalGraph& graph,
                                      double imaginary_tol = 1e-8);

// mu_* mass fraction of gamma2 below each vertex, 0 at z_* and 1 at the pole
std::vector<double> mu_cdf(const TrajectoryArc& gamma2);

// sup distance between the empirical CDF of the zeros in Re z > 0 (projected to gamma2 by arc length)
// and the mu_* CDF of gamma2
double kolmogorov_distance(const std::vector<cd>& zeros, const CriticalGraph& graph, double imaginary_tol = 1e-8);

void write_arc_csv(std::ostream& os, const TrajectoryArc& arc);

struct SvgLayer {
    std::vector<Polyline> lines;
    std::vector<cd> points;
    std::string color;
};
// plain SVG: polylines and dot markers in a box around the data
void write_svg(std::ostream& os, const std::vector<SvgLayer>& layers, cd lo, cd hi, const std::string& title);

}  // namespace kissing
