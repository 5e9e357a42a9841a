#pragma once

#include <cmath>

namespace sgvf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    // counterclockwise quarter turn
    Vec2 rot90() const { return {-y, x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// cosine of the angle between a and b; 0 when either norm is below `floor`
inline double cosine(const Vec2& a, const Vec2& b, double floor = 1e-12) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < floor || nb < floor) return 0.0;
    double c = a.dot(b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

// 2x2 matrix used by the Stein diagnostic
struct Mat2 {
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    Mat2& operator+=(const Mat2& o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) a[i][j] += o.a[i][j];
        return *this;
    }
    Mat2 operator*(double s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j] * s;
        return r;
    }
    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s += a[i][j] * a[i][j];
        return std::sqrt(s);
    }
};

inline Mat2 outer(const Vec2& u, const Vec2& v) {
    Mat2 m;
    m.a[0][0] = u.x * v.x;
    m.a[0][1] = u.x * v.y;
    m.a[1][0] = u.y * v.x;
    m.a[1][1] = u.y * v.y;
    return m;
}

} // namespace sgvf
