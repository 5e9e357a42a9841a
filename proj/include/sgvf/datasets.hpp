#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgvf/geometry.hpp"

namespace sgvf {

// Unordered waypoint set. `labels`, when non-empty, assigns each point to a
// path branch (0..B-1, every branch non-empty).
struct PointCloud {
    std::vector<Vec2> points;
    std::vector<int> labels;
    std::string name;

    std::size_t size() const { return points.size(); }
    bool has_labels() const { return !labels.empty(); }
    int branch_count() const;
    void validate() const;

    // points of one branch (whole cloud when unlabeled and branch == 0)
    std::vector<Vec2> branch(int id) const;
};

struct BoundingBox {
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    BoundingBox inflated(double margin) const {
        return {x_min - margin, x_max + margin, y_min - margin, y_max + margin};
    }
};

BoundingBox bounding_box(const PointCloud& cloud);

PointCloud gen_circle(Vec2 center, double radius, int n, double jitter_sigma, std::uint64_t seed);

// Two labeled circles sharing a center, radii r1 < r2, n points each.
PointCloud gen_concentric(Vec2 center, double r1, double r2, int n_each, double jitter_sigma,
                          std::uint64_t seed);

// Two labeled disjoint circles; throws ConfigError when they overlap.
PointCloud gen_separated(Vec2 c1, Vec2 c2, double radius, int n_each, double jitter_sigma,
                         std::uint64_t seed);

struct PolygonCloud {
    PointCloud cloud;
    std::vector<Vec2> corners;
};

// Regular n-gon sampled at equal arc-length steps starting from the first
// vertex, so vertices are included whenever n_points is a multiple of
// n_sides (at zero jitter).
PolygonCloud gen_polygon(int n_sides, double circumradius, int n_points, double jitter_sigma,
                         std::uint64_t seed);

PointCloud shuffle_cloud(const PointCloud& cloud, std::uint64_t seed);

// CSV with header "x,y" (or "x,y,branch" when labeled), one point per row.
void save_waypoints_csv(const PointCloud& cloud, const std::string& path);
PointCloud load_waypoints_csv(const std::string& path);

void save_corners_csv(const std::vector<Vec2>& corners, const std::string& path);
std::vector<Vec2> load_corners_csv(const std::string& path);

} // namespace sgvf
