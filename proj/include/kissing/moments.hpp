#pragma once

#include <cmath>
#include <vector>

#include "kissing/errors.hpp"
#include "kissing/scalar.hpp"

namespace kissing {

constexpr int kMomentCapacity = 100000;

template <class T>
struct MomentTable {
    T omega;
    std::vector<cplx<T>> raw;       // int z^k e^{i omega z}
    std::vector<cplx<T>> modified;  // int P_k(z) e^{i omega z}
};

namespace detail {

template <class T>
std::vector<cplx<T>> raw_moments(const T& omega, int K)
{
    using std::abs, std::cos, std::sin, std::log;
    const cplx<T> I(0, 1);
    std::vector<cplx<T>> m(K + 1, cplx<T>(0));
    const T aw = real_abs(omega);
    const T eps = Num<T>::eps();
    if (aw < T(1e-3)) {
        // sum_j (i w)^j / j! * int z^{k+j}
        for (int k = 0; k <= K; ++k) {
            cplx<T> term(1), sum(0);
            for (int j = 0; j < 400; ++j) {
                if ((k + j) % 2 == 0) sum += term * T(2) / T(k + j + 1);
                if (j > 1 && abs(term) < eps * T(1e-3)) break;
                term *= I * omega / T(j + 1);
            }
            m[k] = sum;
        }
        return m;
    }
    const cplx<T> e_pos(cos(omega), sin(omega)), e_neg(cos(omega), -sin(omega));
    const cplx<T> iw = I * omega;
    auto boundary = [&](int k) { return (e_pos - (k % 2 == 0 ? e_neg : -e_neg)) / iw; };
    // upward is stable while k <= |omega|, downward beyond
    const double awd = to_double(aw);
    const int k_sw = awd >= K ? K : static_cast<int>(std::floor(awd));
    m[0] = cplx<T>(T(2) * sin(omega) / omega);
    for (int k = 1; k <= std::min(K, k_sw); ++k) m[k] = boundary(k) - T(k) / iw * m[k - 1];
    if (K > k_sw) {
        const double target = static_cast<double>(Num<T>::digits()) * std::log(10.0) + 10;
        const double w = to_double(aw);
        int top = K;
        double damping = 0;
        while (damping < target) {
            ++top;
            damping += std::log(top / w);
        }
        cplx<T> cur(0);  // m_top, started at zero
        for (int k = top; k > k_sw + 1; --k) {
            if (k <= K) m[k] = cur;
            cur = iw / T(k) * (boundary(k) - cur);
        }
        m[k_sw + 1] = cur;
    }
    return m;
}

// mu_k = 2 i^k j_k(omega) by Miller's backward recurrence.
template <class T>
std::vector<cplx<T>> modified_moments(const T& omega, int K)
{
    using std::sin, std::cos;
    std::vector<cplx<T>> mu(K + 1, cplx<T>(0));
    const T w = real_abs(omega);
    if (w == 0) {
        mu[0] = cplx<T>(2);
        return mu;
    }
    const int digits = static_cast<int>(Num<T>::digits());
    const int top = K + static_cast<int>(std::ceil(to_double(w))) + 2 * digits + 20;
    std::vector<T> j(K + 2, T(0));
    T next(0), cur(1e-30);  // f_{top+1}, f_top
    const T big(1e100);
    for (int k = top; k >= 1; --k) {
        T prev = T(2 * k + 1) / w * cur - next;  // f_{k-1}
        if (k - 1 <= K + 1) j[k - 1] = prev;
        if (k <= K + 1) j[k] = cur;
        next = cur;
        cur = prev;
        if (real_abs(cur) > big) {
            next /= big;
            cur /= big;
            for (auto& v : j) v /= big;
        }
    }
    // least-squares fit of the scale to the exact j_0 and j_1
    const T t0 = sin(w) / w;
    const T t1 = sin(w) / (w * w) - cos(w) / w;
    const T s = (t0 * j[0] + t1 * j[1]) / (j[0] * j[0] + j[1] * j[1]);
    const cplx<T> ipow[4] = {cplx<T>(1), cplx<T>(0, 1), cplx<T>(-1), cplx<T>(0, -1)};
    for (int k = 0; k <= K; ++k) {
        T jk = s * j[k];
        if (omega < 0 && k % 2 == 1) jk = -jk;
        mu[k] = T(2) * ipow[k % 4] * jk;
    }
    return mu;
}

}  // namespace detail

template <class T>
MomentTable<T> moments(const T& omega, int K)
{
    if (K < 0) throw ValidationError("moments: K must be non-negative");
    if (K > kMomentCapacity) throw ValidationError("moments: K exceeds table capacity");
    if (!std::isfinite(to_double(omega))) throw ValidationError("moments: omega must be finite");
    return {omega, detail::raw_moments(omega, K), detail::modified_moments(omega, K)};
}

}  // namespace kissing
