#include "sgvf/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sgvf/csv.hpp"
#include "sgvf/errors.hpp"
#include "sgvf/rng.hpp"

namespace sgvf {

int PointCloud::branch_count() const {
    if (labels.empty()) return points.empty() ? 0 : 1;
    return 1 + *std::max_element(labels.begin(), labels.end());
}

void PointCloud::validate() const {
    if (points.empty()) throw ConfigError("point cloud '" + name + "' is empty");
    for (const Vec2& p : points) {
        if (!p.finite()) throw DomainError("point cloud '" + name + "' contains non-finite points");
    }
    if (!labels.empty()) {
        if (labels.size() != points.size()) {
            throw ShapeError("point cloud '" + name + "': label count != point count");
        }
        const int n_branches = branch_count();
        std::vector<int> counts(static_cast<std::size_t>(n_branches), 0);
        for (int l : labels) {
            if (l < 0 || l >= n_branches) throw ConfigError("branch label out of range");
            counts[static_cast<std::size_t>(l)] += 1;
        }
        for (int c : counts) {
            if (c == 0) throw ConfigError("point cloud '" + name + "' has an empty branch");
        }
    }
}

std::vector<Vec2> PointCloud::branch(int id) const {
    if (labels.empty()) {
        if (id != 0) throw ConfigError("unlabeled cloud has a single branch");
        return points;
    }
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] == id) out.push_back(points[i]);
    }
    return out;
}

BoundingBox bounding_box(const PointCloud& cloud) {
    cloud.validate();
    BoundingBox box{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
                    std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
    for (const Vec2& p : cloud.points) {
        box.x_min = std::min(box.x_min, p.x);
        box.x_max = std::max(box.x_max, p.x);
        box.y_min = std::min(box.y_min, p.y);
        box.y_max = std::max(box.y_max, p.y);
    }
    return box;
}

PointCloud gen_circle(Vec2 center, double radius, int n, double jitter_sigma, std::uint64_t seed) {
    if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
    if (n < 3) throw ConfigError("circle needs at least 3 points");
    PointCloud cloud;
    cloud.name = "circle";
    cloud.points.reserve(static_cast<std::size_t>(n));
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / n;
        Vec2 p{center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)};
        if (jitter_sigma > 0.0) {
            p.x += jitter_sigma * rng.normal();
            p.y += jitter_sigma * rng.normal();
        }
        cloud.points.push_back(p);
    }
    return cloud;
}

PointCloud gen_concentric(Vec2 center, double r1, double r2, int n_each, double jitter_sigma,
                          std::uint64_t seed) {
    if (!(0.0 < r1 && r1 < r2)) throw ConfigError("concentric circles require 0 < r1 < r2");
    PointCloud inner = gen_circle(center, r1, n_each, jitter_sigma, seed);
    PointCloud outer = gen_circle(center, r2, n_each, jitter_sigma, derive_seed(seed, 1));
    PointCloud cloud;
    cloud.name = "concentric";
    cloud.points = std::move(inner.points);
    cloud.points.insert(cloud.points.end(), outer.points.begin(), outer.points.end());
    cloud.labels.assign(static_cast<std::size_t>(n_each), 0);
    cloud.labels.insert(cloud.labels.end(), static_cast<std::size_t>(n_each), 1);
    return cloud;
}

PointCloud gen_separated(Vec2 c1, Vec2 c2, double radius, int n_each, double jitter_sigma,
                         std::uint64_t seed) {
    if (!(distance(c1, c2) > 2.0 * radius)) {
        throw ConfigError("separated circles overlap: center distance must exceed 2*radius");
    }
    PointCloud a = gen_circle(c1, radius, n_each, jitter_sigma, seed);
    PointCloud b = gen_circle(c2, radius, n_each, jitter_sigma, derive_seed(seed, 1));
    PointCloud cloud;
    cloud.name = "separated";
    cloud.points = std::move(a.points);
    cloud.points.insert(cloud.points.end(), b.points.begin(), b.points.end());
    cloud.labels.assign(static_cast<std::size_t>(n_each), 0);
    cloud.labels.insert(cloud.labels.end(), static_cast<std::size_t>(n_each), 1);
    return cloud;
}

PolygonCloud gen_polygon(int n_sides, double circumradius, int n_points, double jitter_sigma,
                         std::uint64_t seed) {
    if (n_sides < 3 || n_sides > 12) throw ConfigError("polygon sides must be in [3, 12]");
    if (!(circumradius > 0.0)) throw ConfigError("polygon circumradius must be positive");
    if (n_points < n_sides) throw ConfigError("polygon needs at least one point per side");

    PolygonCloud out;
    out.corners.reserve(static_cast<std::size_t>(n_sides));
    for (int i = 0; i < n_sides; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / n_sides;
        out.corners.push_back({circumradius * std::cos(angle), circumradius * std::sin(angle)});
    }

    const double side = distance(out.corners[0], out.corners[1]);
    const double perimeter = side * n_sides;
    Rng rng(seed);
    out.cloud.name = "polygon" + std::to_string(n_sides);
    out.cloud.points.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double arc = perimeter * i / n_points;
        const int edge = std::min(static_cast<int>(arc / side), n_sides - 1);
        const double along = arc - edge * side;
        const Vec2& a = out.corners[static_cast<std::size_t>(edge)];
        const Vec2& b = out.corners[static_cast<std::size_t>((edge + 1) % n_sides)];
        Vec2 p = a + (b - a) * (along / side);
        if (jitter_sigma > 0.0) {
            p.x += jitter_sigma * rng.normal();
            p.y += jitter_sigma * rng.normal();
        }
        out.cloud.points.push_back(p);
    }
    return out;
}

PointCloud shuffle_cloud(const PointCloud& cloud, std::uint64_t seed) {
    PointCloud out = cloud;
    Rng rng(seed);
    // Fisher-Yates over points and labels together
    for (std::size_t i = out.points.size(); i > 1; --i) {
        const std::size_t j = rng.index(i);
        std::swap(out.points[i - 1], out.points[j]);
        if (!out.labels.empty()) std::swap(out.labels[i - 1], out.labels[j]);
    }
    return out;
}

void save_waypoints_csv(const PointCloud& cloud, const std::string& path) {
    cloud.validate();
    std::ofstream out = open_output(path);
    out << (cloud.has_labels() ? "x,y,branch\n" : "x,y\n");
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        out << format_double(cloud.points[i].x) << ',' << format_double(cloud.points[i].y);
        if (cloud.has_labels()) out << ',' << cloud.labels[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

PointCloud load_waypoints_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("'" + path + "': missing header line");
    const auto header = split_csv_line(line);
    bool labeled;
    if (header.size() == 2 && header[0] == "x" && header[1] == "y") {
        labeled = false;
    } else if (header.size() == 3 && header[0] == "x" && header[1] == "y" && header[2] == "branch") {
        labeled = true;
    } else {
        throw FormatError("'" + path + "': expected header 'x,y[,branch]', got '" + line + "'");
    }

    PointCloud cloud;
    cloud.name = path;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = "'" + path + "' line " + std::to_string(line_no);
        if (fields.size() != (labeled ? 3u : 2u)) {
            throw FormatError(where + ": expected " + std::to_string(labeled ? 3 : 2) +
                              " columns, got " + std::to_string(fields.size()));
        }
        cloud.points.push_back({parse_double(fields[0], where), parse_double(fields[1], where)});
        if (labeled) cloud.labels.push_back(static_cast<int>(parse_long(fields[2], where)));
    }
    cloud.validate();
    return cloud;
}

void save_corners_csv(const std::vector<Vec2>& corners, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "x,y\n";
    for (const Vec2& c : corners) {
        out << format_double(c.x) << ',' << format_double(c.y) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<Vec2> load_corners_csv(const std::string& path) {
    PointCloud cloud = load_waypoints_csv(path);
    return cloud.points;
}

} // namespace sgvf
