#pragma once

#include <limits>
#include <string>
#include <vector>

#include "kissing/roots.hpp"
#include "kissing/scalar.hpp"

namespace kissing {

// Monic kissing polynomial p_n^omega. Values are held at `digits` working precision
// (16 means the construction ran in double and was lifted exactly).
struct ComplexPolynomial {
    int degree = 0;
    double omega = 0;
    std::vector<cd> coeffs;  // ascending, coeffs[degree] == 1
    cd norm_sq;              // int p_n^2 e^{i omega z} dz
    double cond = 1;         // ||G^{-1}||_1 of the Legendre Gram matrix scaled to unit diagonal at omega = 0
    double growth = 1;       // rounding amplification bound of the construction
    unsigned digits = 16;
    std::string method;  // "chebyshev" or "hankel"

    // recurrence p_{k+1} = (z - alpha_k) p_k - beta_k p_{k-1}; empty for the Hankel path
    std::vector<cplx<Extended>> alpha, beta;
    std::vector<cplx<Extended>> coeffs_ext;
    cplx<Extended> norm_sq_ext;

    bool extended() const { return digits > 16; }
    unsigned eval_digits() const { return std::max(digits, 30u); }
    // Evaluate at the current default Extended precision; callers set it with DigitsGuard.
    PolyValue<Extended> evaluate(const cplx<Extended>& z) const;
    cd operator()(cd z) const;
};

struct PolyOptions {
    Precision precision = Precision::Auto;
    // error when cond exceeds this; the working precision imposes its own bound 10^(digits-3)
    double existence_threshold = std::numeric_limits<double>::infinity();
    unsigned max_digits = 800;
};

ComplexPolynomial monic_op(int n, double omega, const PolyOptions& opt = {});

// Raw-moment Hankel solve, kept as the reference construction. digits <= 16 runs in double.
ComplexPolynomial monic_hankel(int n, double omega, unsigned digits = 16);

// Gram-matrix conditioning of the degree-n defining system, at sufficient precision.
double existence_condition(int n, double omega);

struct ExistencePoint {
    double lambda;
    double omega;
    double cond;
    bool flagged;
};

// lambda grid (omega = n lambda). Flagged: cond above threshold, or a local spike of at
// least spike_factor over the geometric mean of its two neighbours.
std::vector<ExistencePoint> existence_scan(int n, double lambda_lo, double lambda_hi, int steps,
                                           double threshold = 1e8, double spike_factor = 2.0);

struct ZeroSet {
    std::vector<cd> zeros;
    int imaginary_index = -1;  // odd degree: the zero with |Re| < tol, if any
};

ZeroSet zeros_of(const ComplexPolynomial& p, double imaginary_tol = 1e-8);
std::vector<cplx<Extended>> zeros_of_extended(const ComplexPolynomial& p);

// max_k |int p z^k e^{i omega z}| / sum_j |c_j m_{j+k}| for k < n, from raw moments.
double orthogonality_residual(const ComplexPolynomial& p);

}  // namespace kissing
