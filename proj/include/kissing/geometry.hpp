#pragma once

#include <vector>

#include "kissing/contour.hpp"

namespace kissing {

using Polyline = std::vector<cd>;

double point_segment_distance(cd p, cd a, cd b);
double segment_segment_distance(cd a, cd b, cd c, cd d);
bool segments_intersect(cd a, cd b, cd c, cd d);

double distance_to_path(cd p, const Path<double>& path);
bool paths_intersect(const Path<double>& a, const Path<double>& b);

// Closest point on a polyline and its arc-length coordinate.
struct Projection {
    cd point;
    double arclength;
    double distance;
};
Projection project_onto(cd p, const Polyline& line);

// Winding number of the closed polygon (last vertex joins the first) around p.
int winding_number(cd p, const Polyline& polygon);

Polyline simplify(const Polyline& line, double tol);

struct PlanOptions {
    double clearance = 1e-3;
    // Intermediate points the route must visit in order (used to force the far side of a cut).
    std::vector<cd> via;
};

// Shortest visibility-graph route keeping `clearance` from the obstacles.
Path<double> plan_path(cd from, cd to, const std::vector<Path<double>>& obstacles, const PlanOptions& opt = {});

}  // namespace kissing
