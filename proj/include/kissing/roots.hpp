#pragma once

#include <algorithm>
#include <sstream>
#include <vector>

#include "kissing/errors.hpp"
#include "kissing/scalar.hpp"

namespace kissing {

template <class T>
struct PolyValue {
    cplx<T> p, dp;
    T scale;  // sum |a_k||z|^k style magnitude for the backward-error test
};

struct RootOptions {
    int max_iter = 2000;
    double residual_factor = 1e3;  // accepted |p| <= factor * eps * scale
};

namespace detail {

template <class T>
bool lex_less(const cplx<T>& a, const cplx<T>& b)
{
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

// Real part first, imaginary part within clusters of equal real part (up to rounding).
template <class T>
void sort_roots(std::vector<cplx<T>>& z)
{
    std::sort(z.begin(), z.end(), lex_less<T>);
    T scale = 1;
    for (const auto& w : z) scale = std::max(scale, T(abs(w)));
    const T tol = T(1e3) * Num<T>::eps() * scale;
    std::size_t i = 0;
    while (i < z.size()) {
        std::size_t j = i + 1;
        while (j < z.size() && z[j].real() - z[j - 1].real() <= tol) ++j;
        std::sort(z.begin() + i, z.begin() + j,
                  [](const cplx<T>& a, const cplx<T>& b) { return a.imag() < b.imag(); });
        i = j;
    }
}

}  // namespace detail

// Aberth-Ehrlich on a user evaluator. init: starting points (size = degree).
template <class T, class Eval>
std::vector<cplx<T>> aberth(Eval&& eval, std::vector<cplx<T>> z, const RootOptions& opt = {})
{
    const std::size_t n = z.size();
    const T eps = Num<T>::eps();
    std::vector<char> done(n, 0);
    std::size_t remaining = n;
    for (int it = 0; it < opt.max_iter && remaining > 0; ++it) {
        for (std::size_t k = 0; k < n; ++k) {
            if (done[k]) continue;
            PolyValue<T> v = eval(z[k]);
            if (abs(v.p) <= T(8) * eps * v.scale) {
                done[k] = 1;
                --remaining;
                continue;
            }
            cplx<T> ratio = v.p / v.dp;
            cplx<T> sum(0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) sum += T(1) / (z[k] - z[j]);
            cplx<T> corr = ratio / (T(1) - ratio * sum);
            z[k] -= corr;
            if (abs(corr) <= T(4) * eps * abs(z[k])) {
                done[k] = 1;
                --remaining;
            }
        }
    }
    std::vector<std::size_t> bad;
    for (std::size_t k = 0; k < n; ++k) {
        PolyValue<T> v = eval(z[k]);
        if (to_double(abs(v.p)) > opt.residual_factor * to_double(eps * v.scale)) bad.push_back(k);
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "polynomial_roots: " << bad.size() << " unconverged roots:";
        for (auto k : bad) os << " (" << to_double(z[k].real()) << "," << to_double(z[k].imag()) << ")";
        throw NumericalError(os.str(), static_cast<double>(bad.size()));
    }
    detail::sort_roots(z);
    return z;
}

// Deterministic start: circle around the root centroid with radius from Fujiwara's bound.
template <class T>
std::vector<cplx<T>> initial_circle(const std::vector<cplx<T>>& c)
{
    const int n = static_cast<int>(c.size()) - 1;
    const cplx<T> lead = c[n];
    const cplx<T> center = -c[n - 1] / (lead * T(n));
    T bound = 0;
    for (int k = 1; k <= n; ++k) {
        T a = abs(c[n - k] / lead);
        if (k == n) a /= 2;
        bound = std::max(bound, T(pow(a, T(1) / T(k))));
    }
    T r = std::max(T(2) * bound - abs(center), bound) / 2;
    if (r == 0) r = 1;
    std::vector<cplx<T>> z;
    for (int k = 0; k < n; ++k) {
        T t = 2 * Num<T>::pi() * T(k) / T(n) + T(7) / 10;
        z.push_back(center + r * cplx<T>(cos(t), sin(t)));
    }
    return z;
}

template <class T>
std::vector<cplx<T>> polynomial_roots(const std::vector<cplx<T>>& c, const RootOptions& opt = {})
{
    if (c.size() < 2) throw ValidationError("polynomial_roots: degree must be at least 1");
    if (c.back() == cplx<T>(0)) throw ValidationError("polynomial_roots: leading coefficient is zero");
    auto horner = [&c](const cplx<T>& z) {
        PolyValue<T> v{c.back(), cplx<T>(0), abs(c.back())};
        const T az = abs(z);
        for (std::size_t i = c.size() - 1; i-- > 0;) {
            v.dp = v.dp * z + v.p;
            v.p = v.p * z + c[i];
            v.scale = v.scale * az + abs(c[i]);
        }
        return v;
    };
    if (c.size() == 2) return {-c[0] / c[1]};
    return aberth<T>(horner, initial_circle(c), opt);
}

}  // namespace kissing
