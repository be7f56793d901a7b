#include "kissing/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace kissing {

namespace {

double cross(cd a, cd b) { return a.real() * b.imag() - a.imag() * b.real(); }

int orient(cd a, cd b, cd c)
{
    double v = cross(b - a, c - a);
    double scale = std::abs(b - a) * std::abs(c - a);
    if (std::abs(v) <= 1e-15 * scale) return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(cd a, cd b, cd p)
{
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

struct Seg {
    cd a, b;
    double xlo, xhi, ylo, yhi;
};

std::vector<Seg> segments_of(const Polyline& v, bool closed)
{
    std::vector<Seg> out;
    std::size_t n = closed ? v.size() : v.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        cd a = v[i], b = v[(i + 1) % v.size()];
        out.push_back({a, b, std::min(a.real(), b.real()), std::max(a.real(), b.real()), std::min(a.imag(), b.imag()),
                       std::max(a.imag(), b.imag())});
    }
    return out;
}

double distance_to_segs(cd p, const std::vector<Seg>& segs)
{
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : segs) {
        double box = std::max({s.xlo - p.real(), p.real() - s.xhi, s.ylo - p.imag(), p.imag() - s.yhi, 0.0});
        if (box >= d) continue;
        d = std::min(d, point_segment_distance(p, s.a, s.b));
    }
    return d;
}

bool edge_clear(cd p, cd q, const std::vector<Seg>& segs, double req)
{
    const double xlo = std::min(p.real(), q.real()) - req, xhi = std::max(p.real(), q.real()) + req;
    const double ylo = std::min(p.imag(), q.imag()) - req, yhi = std::max(p.imag(), q.imag()) + req;
    for (const auto& s : segs) {
        if (s.xhi < xlo || s.xlo > xhi || s.yhi < ylo || s.ylo > yhi) continue;
        if (segment_segment_distance(p, q, s.a, s.b) < req) return false;
    }
    return true;
}

Path<double> plan_leg(cd from, cd to, const std::vector<Seg>& segs, const std::vector<Polyline>& simple,
                      double clearance, double slack)
{
    const double req = clearance + slack;
    const double d_from = distance_to_segs(from, segs), d_to = distance_to_segs(to, segs);
    if (d_from < 1e-12 || d_to < 1e-12) throw ValidationError("plan_path: endpoint lies on an obstacle");
    auto req_for = [&](bool touches_from, bool touches_to) {
        double r = req;
        if (touches_from) r = std::min(r, 0.5 * d_from);
        if (touches_to) r = std::min(r, 0.5 * d_to);
        return r;
    };
    if (edge_clear(from, to, segs, req_for(true, true))) return Path<double>::segment(from, to);

    std::vector<cd> nodes{from, to};
    const double node_tol = std::max(slack, 1e-3);
    const double radii[] = {3 * clearance, 30 * clearance, 300 * clearance, 3 * node_tol};
    for (const auto& line : simple) {
        for (cd v : line) {
            for (double r : radii) {
                for (int k = 0; k < 8; ++k) {
                    cd w = v + std::polar(r, M_PI / 8 + k * M_PI / 4);
                    if (distance_to_segs(w, segs) >= 1.5 * req) nodes.push_back(w);
                }
            }
        }
    }
    const std::size_t n = nodes.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<long> prev(n, -1);
    std::vector<char> closed(n, 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[0] = 0;
    open.push({std::abs(to - from), 0});
    while (!open.empty()) {
        auto [f, u] = open.top();
        open.pop();
        if (closed[u]) continue;
        closed[u] = 1;
        if (u == 1) break;
        for (std::size_t v = 0; v < n; ++v) {
            if (closed[v] || v == u) continue;
            double nd = dist[u] + std::abs(nodes[v] - nodes[u]);
            if (nd >= dist[v]) continue;
            if (!edge_clear(nodes[u], nodes[v], segs, req_for(u == 0 || v == 0, u == 1 || v == 1))) continue;
            dist[v] = nd;
            prev[v] = static_cast<long>(u);
            open.push({nd + std::abs(to - nodes[v]), v});
        }
    }
    if (prev[1] < 0) throw NumericalError("plan_path: no admissible corridor at the requested clearance");
    std::vector<cd> route;
    for (long v = 1; v >= 0; v = prev[v]) route.push_back(nodes[v]);
    std::reverse(route.begin(), route.end());
    return Path<double>(route);
}

}  // namespace

double point_segment_distance(cd p, cd a, cd b)
{
    cd d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0) return std::abs(p - a);
    double t = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

bool segments_intersect(cd a, cd b, cd c, cd d)
{
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
        if (o1 != 0 || o2 != 0) return true;
    }
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

double segment_segment_distance(cd a, cd b, cd c, cd d)
{
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                     point_segment_distance(d, a, b)});
}

double distance_to_path(cd p, const Path<double>& path)
{
    return distance_to_segs(p, segments_of(path.vertices, path.closed));
}

bool paths_intersect(const Path<double>& a, const Path<double>& b)
{
    auto sa = segments_of(a.vertices, a.closed);
    auto sb = segments_of(b.vertices, b.closed);
    for (const auto& s : sa)
        for (const auto& t : sb) {
            if (s.xhi < t.xlo || t.xhi < s.xlo || s.yhi < t.ylo || t.yhi < s.ylo) continue;
            if (segments_intersect(s.a, s.b, t.a, t.b)) return true;
        }
    return false;
}

Projection project_onto(cd p, const Polyline& line)
{
    Projection best{line.front(), 0.0, std::abs(p - line.front())};
    double s = 0;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        cd a = line[i], d = line[i + 1] - a;
        double len = std::abs(d);
        double t = len > 0 ? std::clamp(((p - a) * std::conj(d)).real() / (len * len), 0.0, 1.0) : 0.0;
        cd q = a + t * d;
        double dist = std::abs(p - q);
        if (dist < best.distance) best = {q, s + t * len, dist};
        s += len;
    }
    return best;
}

int winding_number(cd p, const Polyline& poly)
{
    int w = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        cd a = poly[i], b = poly[(i + 1) % n];
        if (a.imag() <= p.imag()) {
            if (b.imag() > p.imag() && cross(b - a, p - a) > 0) ++w;
        } else {
            if (b.imag() <= p.imag() && cross(b - a, p - a) < 0) --w;
        }
    }
    return w;
}

Polyline simplify(const Polyline& line, double tol)
{
    if (line.size() <= 2) return line;
    std::vector<char> keep(line.size(), 0);
    keep[0] = 1;
    keep[line.size() - 1] = 1;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, line.size() - 1}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        double worst = -1;
        std::size_t k = i;
        for (std::size_t m = i + 1; m < j; ++m) {
            double d = point_segment_distance(line[m], line[i], line[j]);
            if (d > worst) {
                worst = d;
                k = m;
            }
        }
        if (worst > tol) {
            keep[k] = 1;
            stack.push_back({i, k});
            stack.push_back({k, j});
        }
    }
    Polyline out;
    for (std::size_t m = 0; m < line.size(); ++m)
        if (keep[m]) out.push_back(line[m]);
    return out;
}

Path<double> plan_path(cd from, cd to, const std::vector<Path<double>>& obstacles, const PlanOptions& opt)
{
    if (opt.clearance <= 0) throw ValidationError("plan_path: clearance must be positive");
    const double slack = opt.clearance / 4;
    std::vector<Seg> segs;
    std::vector<Polyline> simple;
    // clearance is checked against the fine simplification; waypoints come from a coarse one
    for (const auto& ob : obstacles) {
        Polyline v = ob.vertices;
        if (ob.closed) v.push_back(v.front());
        auto ss = segments_of(simplify(v, slack), false);
        segs.insert(segs.end(), ss.begin(), ss.end());
        simple.push_back(simplify(v, std::max(slack, 1e-3)));
    }
    std::vector<cd> stops{from};
    stops.insert(stops.end(), opt.via.begin(), opt.via.end());
    stops.push_back(to);
    std::vector<cd> route{from};
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
        if (segs.empty()) {
            route.push_back(stops[i + 1]);
            continue;
        }
        auto leg = plan_leg(stops[i], stops[i + 1], segs, simple, opt.clearance, slack);
        route.insert(route.end(), leg.vertices.begin() + 1, leg.vertices.end());
    }
    return Path<double>(route);
}

}  // namespace kissing
