#include "kissing/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "kissing/errors.hpp"
#include "kissing/moments.hpp"

namespace kissing {

namespace {

template <class T>
using CVec = std::vector<cplx<T>>;
template <class T>
using CMat = Eigen::Matrix<cplx<T>, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
struct Chebyshev {
    CVec<T> alpha, beta;
    cplx<T> norm_sq;
    double growth = 1;
};

// Modified Chebyshev algorithm on monic Legendre moments nu_k = mu_k / lead_k.
template <class T>
Chebyshev<T> chebyshev(int n, const CVec<T>& mu)
{
    const int L = 2 * n;
    CVec<T> nu(L + 1);
    T lead(1);
    for (int k = 0; k <= L; ++k) {
        if (k > 0) lead = lead * T(2 * k - 1) / T(k);
        nu[k] = mu[k] / lead;
    }
    auto b = [](int l) { return T(l * l) / T(4 * l * l - 1); };
    Chebyshev<T> out;
    out.alpha.resize(n);
    out.beta.resize(n);
    CVec<T> s_prev2(L + 2, cplx<T>(0)), s_prev(L + 2, cplx<T>(0));
    std::vector<T> a_prev2(L + 2, T(0)), a_prev(L + 2, T(0));
    for (int l = 0; l <= L; ++l) {
        s_prev[l] = nu[l];
        a_prev[l] = abs(nu[l]);
    }
    if (n == 0) {
        out.norm_sq = nu[0];
        return out;
    }
    if (nu[0] == cplx<T>(0)) throw NumericalError("monic_op: zero moment mu_0, p_1 does not exist", INFINITY);
    out.alpha[0] = nu[1] / nu[0];
    out.beta[0] = nu[0];
    double growth = 1;
    for (int k = 1; k <= n; ++k) {
        CVec<T> s(L + 2, cplx<T>(0));
        std::vector<T> a(L + 2, T(0));
        const cplx<T> al = out.alpha[k - 1], be = out.beta[k - 1];
        const T abs_al = abs(al), abs_be = abs(be);
        for (int l = k; l <= L - k; ++l) {
            s[l] = s_prev[l + 1] - al * s_prev[l] + b(l) * s_prev[l - 1];
            a[l] = a_prev[l + 1] + abs_al * a_prev[l] + b(l) * a_prev[l - 1];
            if (k >= 2) {
                s[l] -= be * s_prev2[l];
                a[l] += abs_be * a_prev2[l];
            }
        }
        const T skk = abs(s[k]);
        if (skk == 0) {
            std::ostringstream os;
            os << "monic_op: degenerate Hankel ratio at degree " << k << ", p_" << k + 1 << " does not exist";
            throw NumericalError(os.str(), INFINITY);
        }
        growth = std::max(growth, to_double(a[k] / skk));
        if (k < n) {
            out.alpha[k] = s[k + 1] / s[k] - s_prev[k] / s_prev[k - 1];
            out.beta[k] = s[k] / s_prev[k - 1];
            const T scale = std::max(T(1), T(abs(out.alpha[k])));
            growth = std::max(growth, to_double(a[k + 1] / (skk * scale)));
        } else {
            out.norm_sq = s[k];
        }
        s_prev2.swap(s_prev);
        s_prev.swap(s);
        a_prev2.swap(a_prev);
        a_prev.swap(a);
    }
    out.growth = growth;
    return out;
}

template <class T>
T inverse_norm1(const CMat<T>& A)
{
    CMat<T> inv = Eigen::PartialPivLU<CMat<T>>(A).inverse();
    T best(0);
    for (Eigen::Index j = 0; j < inv.cols(); ++j) {
        T col(0);
        for (Eigen::Index i = 0; i < inv.rows(); ++i) col += abs(inv(i, j));
        best = std::max(best, col);
    }
    return best;
}

// ||G^{-1}||_1 for G_jk = int P~_j P~_k e^{i omega z}, P~ orthonormal Legendre; entries via
// the Legendre linearization formula on the modified moments.
template <class T>
double gram_condition(int n, const CVec<T>& mu)
{
    if (n == 0) return 1;
    std::vector<T> A(2 * n + 1);
    A[0] = 1;
    for (int r = 1; r <= 2 * n; ++r) A[r] = A[r - 1] * T(2 * r - 1) / T(r);
    CMat<T> G(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k <= j; ++k) {
            cplx<T> g(0);
            for (int r = 0; r <= k; ++r) {
                const T c = A[j - r] * A[r] * A[k - r] / A[j + k - r] * T(2 * j + 2 * k - 4 * r + 1) /
                            T(2 * j + 2 * k - 2 * r + 1);
                g += c * mu[j + k - 2 * r];
            }
            g *= sqrt(T((2 * j + 1) * (2 * k + 1))) / T(2);
            G(j, k) = g;
            G(k, j) = g;
        }
    const double c = to_double(inverse_norm1<T>(G));
    return std::isfinite(c) ? c : INFINITY;
}

template <class T>
CVec<T> coefficients_from_recurrence(int n, const CVec<T>& alpha, const CVec<T>& beta)
{
    CVec<T> prev, cur{cplx<T>(1)};
    for (int k = 0; k < n; ++k) {
        CVec<T> next(k + 2, cplx<T>(0));
        for (int i = 0; i <= k; ++i) {
            next[i + 1] += cur[i];
            next[i] -= alpha[k] * cur[i];
        }
        if (k > 0)
            for (int i = 0; i < k; ++i) next[i] -= beta[k] * prev[i];
        prev.swap(cur);
        cur.swap(next);
    }
    return cur;
}

cplx<Extended> to_ext(const cd& z) { return lift<Extended>(z); }
cplx<Extended> to_ext(const cplx<Extended>& z) { return cplx<Extended>(Extended(z.real()), Extended(z.imag())); }

template <class T>
ComplexPolynomial chebyshev_at(int n, double omega)
{
    const auto mu = detail::modified_moments<T>(T(omega), std::max(2 * n, 1));
    Chebyshev<T> ch = chebyshev<T>(n, mu);
    ComplexPolynomial p;
    p.degree = n;
    p.omega = omega;
    p.method = "chebyshev";
    p.growth = ch.growth;
    p.cond = gram_condition<T>(n, mu);
    p.digits = std::is_same_v<T, double> ? 16u : Num<Extended>::digits();
    auto c = coefficients_from_recurrence<T>(n, ch.alpha, ch.beta);
    c[n] = cplx<T>(1);
    DigitsGuard guard(p.eval_digits());
    for (const auto& v : c) {
        p.coeffs_ext.push_back(to_ext(v));
        p.coeffs.push_back(to_cd(v));
    }
    for (int k = 0; k < n; ++k) {
        p.alpha.push_back(to_ext(ch.alpha[k]));
        p.beta.push_back(to_ext(ch.beta[k]));
    }
    p.norm_sq_ext = to_ext(ch.norm_sq);
    p.norm_sq = to_cd(ch.norm_sq);
    return p;
}

std::string diag(const char* what, const ComplexPolynomial& p)
{
    std::ostringstream os;
    os << what << " (n=" << p.degree << ", omega=" << p.omega << ", cond=" << p.cond << ", growth=" << p.growth
       << ", digits=" << p.digits << ")";
    return os.str();
}

template <class T>
ComplexPolynomial hankel_at(int n, double omega)
{
    const auto m = detail::raw_moments<T>(T(omega), 2 * n);
    ComplexPolynomial p;
    p.degree = n;
    p.omega = omega;
    p.method = "hankel";
    p.digits = std::is_same_v<T, double> ? 16u : Num<Extended>::digits();
    CVec<T> c(n + 1, cplx<T>(0));
    c[n] = cplx<T>(1);
    if (n > 0) {
        CMat<T> H(n, n);
        Eigen::Matrix<cplx<T>, Eigen::Dynamic, 1> rhs(n);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) H(k, j) = m[j + k];
            rhs(k) = -m[n + k];
        }
        Eigen::PartialPivLU<CMat<T>> lu(H);
        Eigen::Matrix<cplx<T>, Eigen::Dynamic, 1> x = lu.solve(rhs);
        T hnorm(0);
        for (int j = 0; j < n; ++j) {
            T col(0);
            for (int k = 0; k < n; ++k) col += abs(H(k, j));
            hnorm = std::max(hnorm, col);
        }
        p.cond = to_double(hnorm * inverse_norm1<T>(H));
        if (!std::isfinite(p.cond)) p.cond = INFINITY;
        p.growth = p.cond;
        for (int j = 0; j < n; ++j) c[j] = x(j);
    }
    cplx<T> h(0);
    for (int j = 0; j <= n; ++j) h += c[j] * m[n + j];
    DigitsGuard guard(p.eval_digits());
    for (const auto& v : c) {
        p.coeffs_ext.push_back(to_ext(v));
        p.coeffs.push_back(to_cd(v));
    }
    p.norm_sq_ext = to_ext(h);
    p.norm_sq = to_cd(h);
    return p;
}

unsigned needed_digits(const ComplexPolynomial& p)
{
    const double g = std::max(1.0, p.growth), c = std::max(1.0, p.cond);
    if (!std::isfinite(g) || !std::isfinite(c)) return UINT32_MAX;
    return static_cast<unsigned>(std::ceil(std::max({32.0, 25 + std::log10(g), 8 + std::log10(c)})));
}

}  // namespace

PolyValue<Extended> ComplexPolynomial::evaluate(const cplx<Extended>& z) const
{
    const Extended az = abs(z);
    if (!alpha.empty()) {
        cplx<Extended> p0(1), p1 = z - alpha[0], d0(0), d1(1);
        Extended s0(1), s1 = az + abs(alpha[0]);
        for (int k = 1; k < degree; ++k) {
            cplx<Extended> p2 = (z - alpha[k]) * p1 - beta[k] * p0;
            cplx<Extended> d2 = p1 + (z - alpha[k]) * d1 - beta[k] * d0;
            Extended s2 = (az + abs(alpha[k])) * s1 + abs(beta[k]) * s0;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
            s0 = s1;
            s1 = s2;
        }
        return {p1, d1, s1};
    }
    PolyValue<Extended> v{coeffs_ext.back(), cplx<Extended>(0), abs(coeffs_ext.back())};
    for (std::size_t i = coeffs_ext.size() - 1; i-- > 0;) {
        v.dp = v.dp * z + v.p;
        v.p = v.p * z + coeffs_ext[i];
        v.scale = v.scale * az + abs(coeffs_ext[i]);
    }
    return v;
}

cd ComplexPolynomial::operator()(cd z) const
{
    if (degree == 0) return 1;
    DigitsGuard guard(eval_digits());
    return to_cd(evaluate(lift<Extended>(z)).p);
}

ComplexPolynomial monic_op(int n, double omega, const PolyOptions& opt)
{
    if (n < 0) throw ValidationError("monic_op: degree must be non-negative");
    if (!std::isfinite(omega)) throw ValidationError("monic_op: omega must be finite");
    if (2 * n + 1 > kMomentCapacity) throw ValidationError("monic_op: degree exceeds moment table capacity");

    auto check_existence = [&](const ComplexPolynomial& p) {
        if (p.cond > opt.existence_threshold)
            throw NumericalError(diag("monic_op: defining system above the existence threshold", p), p.cond);
    };

    if (opt.precision != Precision::Extended) {
        ComplexPolynomial p = chebyshev_at<double>(n, omega);
        if (opt.precision == Precision::Double) {
            if (!(p.cond < 1e13) || !(p.growth < 1e16))
                throw NumericalError(diag("monic_op: defining system numerically singular in double precision", p),
                                     p.cond);
            check_existence(p);
            return p;
        }
        if (p.growth <= 1e8 && p.cond <= 1e8) {
            check_existence(p);
            return p;
        }
    }
    unsigned d = 40;
    for (int attempt = 0; attempt < 8; ++attempt) {
        if (d > opt.max_digits) break;
        DigitsGuard guard(d);
        ComplexPolynomial p = chebyshev_at<Extended>(n, omega);
        const unsigned need = needed_digits(p);
        if (need <= d) {
            check_existence(p);
            return p;
        }
        if (need == UINT32_MAX) throw NumericalError(diag("monic_op: defining system singular", p), p.cond);
        d = std::max(need + 5, d + 10);
    }
    std::ostringstream os;
    os << "monic_op: required precision exceeds " << opt.max_digits << " digits (n=" << n << ", omega=" << omega
       << ")";
    throw NumericalError(os.str(), INFINITY);
}

ComplexPolynomial monic_hankel(int n, double omega, unsigned digits)
{
    if (n < 0) throw ValidationError("monic_hankel: degree must be non-negative");
    if (!std::isfinite(omega)) throw ValidationError("monic_hankel: omega must be finite");
    if (digits <= 16) return hankel_at<double>(n, omega);
    DigitsGuard guard(digits);
    return hankel_at<Extended>(n, omega);
}

double existence_condition(int n, double omega)
{
    if (n < 0) throw ValidationError("existence_condition: degree must be non-negative");
    if (n == 0) return 1;
    double c = gram_condition<double>(n, detail::modified_moments<double>(omega, 2 * n));
    if (c < 1e10) return c;
    unsigned d = 30;
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (std::isfinite(c)) d = std::max(d, static_cast<unsigned>(std::log10(c)) + 20);
        DigitsGuard guard(d);
        double next = gram_condition<Extended>(n, detail::modified_moments<Extended>(Extended(omega), 2 * n));
        if (std::isfinite(next) && std::log10(next) + 10 < d) return next;
        c = next;
        d += 40;
    }
    return INFINITY;
}

std::vector<ExistencePoint> existence_scan(int n, double lo, double hi, int steps, double threshold,
                                           double spike_factor)
{
    if (n < 1) throw ValidationError("existence_scan: n must be at least 1");
    if (steps < 1) throw ValidationError("existence_scan: steps must be positive");
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ValidationError("existence_scan: invalid lambda range");
    std::vector<ExistencePoint> pts;
    for (int i = 0; i < steps; ++i) {
        double lam = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
        pts.push_back({lam, n * lam, existence_condition(n, n * lam), false});
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool spike = false;
        if (i > 0 && i + 1 < pts.size()) {
            const double l = pts[i - 1].cond, r = pts[i + 1].cond, c = pts[i].cond;
            spike = c >= l && c >= r && c >= spike_factor * std::sqrt(l * r);
        }
        pts[i].flagged = pts[i].cond > threshold || spike;
    }
    return pts;
}

std::vector<cplx<Extended>> zeros_of_extended(const ComplexPolynomial& p)
{
    if (p.degree < 1) throw ValidationError("zeros_of: degree must be at least 1");
    DigitsGuard guard(p.eval_digits());
    if (p.degree == 1) return {to_ext(-p.coeffs_ext[0])};
    std::vector<cplx<Extended>> c;
    for (const auto& v : p.coeffs_ext) c.push_back(to_ext(v));
    auto eval = [&p](const cplx<Extended>& z) { return p.evaluate(z); };
    return aberth<Extended>(eval, initial_circle(c));
}

ZeroSet zeros_of(const ComplexPolynomial& p, double imaginary_tol)
{
    ZeroSet out;
    for (const auto& z : zeros_of_extended(p)) out.zeros.push_back(to_cd(z));
    if (p.degree % 2 == 1) {
        int found = -1, count = 0;
        for (std::size_t k = 0; k < out.zeros.size(); ++k)
            if (std::abs(out.zeros[k].real()) < imaginary_tol) {
                found = static_cast<int>(k);
                ++count;
            }
        if (count == 1) out.imaginary_index = found;
    }
    return out;
}

double orthogonality_residual(const ComplexPolynomial& p)
{
    if (p.degree == 0) return 0;
    DigitsGuard guard(p.eval_digits() + 10);
    const auto m = detail::raw_moments<Extended>(Extended(p.omega), 2 * p.degree);
    double worst = 0;
    for (int k = 0; k < p.degree; ++k) {
        cplx<Extended> s(0);
        Extended scale(0);
        for (int j = 0; j <= p.degree; ++j) {
            s += p.coeffs_ext[j] * m[j + k];
            scale += abs(p.coeffs_ext[j]) * abs(m[j + k]);
        }
        worst = std::max(worst, to_double(abs(s) / scale));
    }
    return worst;
}

}  // namespace kissing
