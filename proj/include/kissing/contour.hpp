#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "kissing/errors.hpp"
#include "kissing/gk15_table.hpp"
#include "kissing/scalar.hpp"

namespace kissing {

template <class T>
struct Path {
    std::vector<cplx<T>> vertices;
    bool closed = false;

    Path() = default;
    explicit Path(std::vector<cplx<T>> v, bool is_closed = false) : vertices(std::move(v)), closed(is_closed)
    {
        validate();
    }

    static Path segment(const cplx<T>& a, const cplx<T>& b) { return Path({a, b}); }

    // m-gon approximation is fine here: the integrator works on the polygon itself,
    // and Cauchy makes the polygon as good as the circle for analytic integrands.
    static Path circle(const cplx<T>& c, const T& r, int m = 64, bool ccw = true)
    {
        std::vector<cplx<T>> v;
        for (int k = 0; k < m; ++k) {
            T t = 2 * Num<T>::pi() * T(k) / T(m);
            if (!ccw) t = -t;
            v.push_back(c + r * cplx<T>(cos(t), sin(t)));
        }
        return Path(std::move(v), true);
    }

    void validate() const
    {
        const std::size_t need = closed ? 3 : 2;
        if (vertices.size() < need) throw ValidationError("path needs more vertices");
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
            if (vertices[i] == vertices[i + 1]) throw ValidationError("path has repeated consecutive vertices");
        if (closed && vertices.front() == vertices.back())
            throw ValidationError("closed path must not repeat its first vertex");
    }

    std::size_t segments() const { return closed ? vertices.size() : vertices.size() - 1; }
    const cplx<T>& seg_start(std::size_t i) const { return vertices[i]; }
    const cplx<T>& seg_end(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
    const cplx<T>& front() const { return vertices.front(); }
    cplx<T> back() const { return closed ? vertices.front() : vertices.back(); }

    T length() const
    {
        T s = 0;
        for (std::size_t i = 0; i < segments(); ++i) s += abs(seg_end(i) - seg_start(i));
        return s;
    }

    Path reversed() const
    {
        std::vector<cplx<T>> v(vertices.rbegin(), vertices.rend());
        if (closed) std::rotate(v.rbegin(), v.rbegin() + 1, v.rend());
        return Path(std::move(v), closed);
    }

    // Image under z -> -conj z with the orientation reversed (mirror pairs p->q with -conj q -> -conj p).
    Path mirrored() const
    {
        std::vector<cplx<T>> v;
        for (auto it = vertices.rbegin(); it != vertices.rend(); ++it) v.push_back(-std::conj(*it));
        return Path(std::move(v), closed);
    }
};

// Which path ends carry an integrable (s - e)^(-1/2) type singularity.
struct Singular {
    bool start = false;
    bool end = false;
};

struct IntegrationOptions {
    double abs_tol = 1e-13;
    double rel_tol = 0.0;
    int max_panels = 6000;
};

template <class T>
struct IntegralResult {
    cplx<T> value;
    double error = 0.0;
    int panels = 0;
};

namespace detail {

template <class T>
struct GK15 {
    std::array<T, 8> x, wk, wg;
};

template <class T>
const GK15<T>& gk15()
{
    // Parsed once per working precision.
    static thread_local std::map<unsigned, GK15<T>> cache;
    const unsigned d = Num<T>::digits();
    auto it = cache.find(d);
    if (it != cache.end()) return it->second;
    GK15<T> g;
    for (int i = 0; i < 8; ++i) {
        g.x[i] = Num<T>::from_string(kGK15[i][0]);
        g.wk[i] = Num<T>::from_string(kGK15[i][1]);
        g.wg[i] = Num<T>::from_string(kGK15[i][2]);
    }
    return cache.emplace(d, g).first->second;
}

enum class Map { Linear, FromStart, FromEnd };

template <class T>
struct Panel {
    std::size_t seg;
    Map map;
    T lo, hi;
    cplx<T> value;
    double err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

template <class T, class F>
void eval_panel(F& f, const cplx<T>& a, const cplx<T>& b, Panel<T>& p)
{
    const auto& g = gk15<T>();
    const T c = (p.lo + p.hi) / 2;
    const T h = (p.hi - p.lo) / 2;
    const cplx<T> d = b - a;
    auto g_at = [&](const T& u) -> cplx<T> {
        switch (p.map) {
        case Map::Linear: return f(a + d * u) * d;
        case Map::FromStart: return f(a + d * (u * u)) * d * (2 * u);
        case Map::FromEnd: return f(b - d * (u * u)) * d * (2 * u);
        }
        return {};
    };
    cplx<T> k = g.wk[0] * g_at(c);
    cplx<T> gs = g.wg[0] * (k / g.wk[0]);
    for (int i = 1; i < 8; ++i) {
        cplx<T> s = g_at(c - h * g.x[i]) + g_at(c + h * g.x[i]);
        k += g.wk[i] * s;
        if (i % 2 == 0) gs += g.wg[i] * s;
    }
    p.value = k * h;
    p.err = to_double(abs((k - gs) * h));
}

}  // namespace detail

template <class T, class F>
IntegralResult<T> integrate_contour_ex(F&& f, const Path<T>& path, IntegrationOptions opt = {}, Singular sing = {})
{
    using detail::Map;
    using P = detail::Panel<T>;
    if (path.closed && (sing.start || sing.end)) throw ValidationError("closed paths have no endpoints to declare");
    std::priority_queue<P> queue;
    std::vector<P> done;
    auto push = [&](P p) {
        detail::eval_panel<T>(f, path.seg_start(p.seg), path.seg_end(p.seg), p);
        queue.push(p);
        return p;
    };
    const std::size_t ns = path.segments();
    const T half = T(1) / 2;
    const T root_half = sqrt(half);
    for (std::size_t i = 0; i < ns; ++i) {
        bool s0 = sing.start && i == 0;
        bool s1 = sing.end && i + 1 == ns;
        if (s0 && s1) {
            push({i, Map::FromStart, T(0), root_half, {}, 0});
            push({i, Map::FromEnd, T(0), root_half, {}, 0});
        } else if (s0) {
            push({i, Map::FromStart, T(0), root_half, {}, 0});
            push({i, Map::Linear, half, T(1), {}, 0});
        } else if (s1) {
            push({i, Map::Linear, T(0), half, {}, 0});
            push({i, Map::FromEnd, T(0), root_half, {}, 0});
        } else {
            push({i, Map::Linear, T(0), T(1), {}, 0});
        }
    }
    const double width_floor = 64.0 * to_double(Num<T>::eps());
    int panels = static_cast<int>(queue.size());
    auto exact_total = [&]() {
        cplx<T> total(0);
        double err = 0;
        auto tmp = queue;
        for (; !tmp.empty(); tmp.pop()) {
            total += tmp.top().value;
            err += tmp.top().err;
        }
        for (const auto& p : done) {
            total += p.value;
            err += p.err;
        }
        return std::make_pair(total, err);
    };
    cplx<T> total;
    double err;
    std::tie(total, err) = exact_total();
    while (true) {
        double target = std::max(opt.abs_tol, opt.rel_tol * to_double(abs(total)));
        if (err <= target || queue.empty()) {
            std::tie(total, err) = exact_total();
            target = std::max(opt.abs_tol, opt.rel_tol * to_double(abs(total)));
            if (err <= target) return {total, err, panels};
            if (queue.empty()) {
                std::ostringstream os;
                os << "integrate_contour: error " << err << " above tolerance " << target
                   << " at roundoff-limited panels";
                throw NumericalError(os.str(), err);
            }
        }
        P worst = queue.top();
        if (panels >= opt.max_panels) {
            std::ostringstream os;
            os << "integrate_contour: no convergence after " << panels << " panels; worst segment " << worst.seg
               << " on [" << to_double(worst.lo) << ", " << to_double(worst.hi) << "], error " << err;
            throw NumericalError(os.str(), err);
        }
        queue.pop();
        if (to_double(worst.hi - worst.lo) < width_floor) {
            done.push_back(worst);
            continue;
        }
        T mid = (worst.lo + worst.hi) / 2;
        total -= worst.value;
        err -= worst.err;
        P left = push({worst.seg, worst.map, worst.lo, mid, {}, 0});
        P right = push({worst.seg, worst.map, mid, worst.hi, {}, 0});
        total += left.value + right.value;
        err += left.err + right.err;
        ++panels;
    }
}

template <class T, class F>
cplx<T> integrate_contour(F&& f, const Path<T>& path, IntegrationOptions opt = {}, Singular sing = {})
{
    return integrate_contour_ex<T>(std::forward<F>(f), path, opt, sing).value;
}

template <class T>
struct BranchTrack {
    cplx<T> base_point;
    cplx<T> base_value;
    std::vector<cplx<T>> points;
    std::vector<cplx<T>> values;

    const cplx<T>& final_value() const { return values.back(); }
    const cplx<T>& final_point() const { return points.back(); }
};

struct BranchOptions {
    double zero_tol = 1e-13;
    double min_step = 1e-12;
    std::size_t max_samples = 500000;
};

namespace detail {

template <class T>
cplx<T> nearest_root(const cplx<T>& g, int order, const cplx<T>& ref)
{
    cplx<T> r = order == 2 ? sqrt(g) : sqrt(sqrt(g));
    cplx<T> best = r;
    T bd = abs(r - ref);
    const cplx<T> unit = order == 2 ? cplx<T>(-1, 0) : cplx<T>(0, 1);
    cplx<T> c = r;
    for (int k = 1; k < order; ++k) {
        c *= unit;
        T d = abs(c - ref);
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return best;
}

}  // namespace detail

// Continues g^(1/order) along the path, keeping |arg jump| < pi/4 between samples.
template <class T, class G>
BranchTrack<T> continue_branch(G&& g, int order, const Path<T>& path, const cplx<T>& initial, BranchOptions opt = {})
{
    if (order != 2 && order != 4) throw ValidationError("continue_branch: root order must be 2 or 4");
    const cplx<T> g0 = g(path.front());
    cplx<T> p0 = initial;
    for (int k = 1; k < order; ++k) p0 *= initial;
    if (to_double(abs(p0 - g0)) > 1e-8 * std::max(1.0, to_double(abs(g0))))
        throw ValidationError("continue_branch: initial value is not a root of g at the path start");

    BranchTrack<T> tr{path.front(), initial, {path.front()}, {initial}};
    const T quarter_pi = Num<T>::pi() / 4;
    cplx<T> w = initial;
    T scale = abs(g0);
    for (std::size_t i = 0; i < path.segments(); ++i) {
        const cplx<T> a = path.seg_start(i), b = path.seg_end(i);
        const T len = abs(b - a);
        const cplx<T> dir = (b - a) / len;
        T s = 0;
        T h = len / 4;
        while (s < len) {
            if (s + h > len) h = len - s;
            const cplx<T> z1 = s + h >= len ? b : a + dir * (s + h);
            const cplx<T> zm = a + dir * (s + h / 2);
            const cplx<T> g1 = g(z1), gm = g(zm);
            scale = std::max(scale, abs(g1));
            if (to_double(abs(g1)) < opt.zero_tol * to_double(scale) ||
                to_double(abs(gm)) < opt.zero_tol * to_double(scale)) {
                throw NumericalError("continue_branch: path passes through a zero or branch point of g");
            }
            const cplx<T> wm = detail::nearest_root(gm, order, w);
            const cplx<T> w1 = detail::nearest_root(g1, order, w);
            const cplx<T> w1m = detail::nearest_root(g1, order, wm);
            const bool ok = abs(arg(w1 / w)) < quarter_pi && abs(arg(wm / w)) < quarter_pi &&
                            abs(w1 - w1m) <= abs(w1) * T(1e-6);
            if (!ok) {
                h /= 2;
                if (to_double(h) < opt.min_step * std::max(1.0, to_double(len)))
                    throw NumericalError("continue_branch: step underflow, branch ambiguous near a singular point");
                continue;
            }
            s += h;
            w = w1;
            tr.points.push_back(z1);
            tr.values.push_back(w1);
            if (tr.points.size() > opt.max_samples) throw NumericalError("continue_branch: sample cap reached");
            h *= 2;
        }
    }
    return tr;
}

// Bracketed root by TOMS 748; returns the end of the final bracket with the smaller |f|.
template <class T, class F>
T find_root_bracketed(F&& f, T lo, T hi, double tol, std::uintmax_t max_iter = 200)
{
    T flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo > 0) == (fhi > 0)) throw ValidationError("find_root_bracketed: no sign change on the bracket");
    auto stop = [tol](const T& a, const T& b) { return to_double(real_abs(T(b - a))) < tol; };
    std::uintmax_t it = max_iter;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, it);
    if (it >= max_iter) throw NumericalError("find_root_bracketed: iteration cap reached");
    T fa = f(r.first), fb = f(r.second);
    return real_abs(fa) <= real_abs(fb) ? r.first : r.second;
}

}  // namespace kissing
