#pragma once

#include <cmath>

namespace nemel {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Mat2 {
  double xx = 0.0, xy = 0.0;
  double yx = 0.0, yy = 0.0;

  Mat2() = default;
  Mat2(double xx_, double xy_, double yx_, double yy_) : xx(xx_), xy(xy_), yx(yx_), yy(yy_) {}

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 outer(const Vec2& a, const Vec2& b) {
    return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
  }

  Mat2 operator+(const Mat2& o) const { return {xx + o.xx, xy + o.xy, yx + o.yx, yy + o.yy}; }
  Mat2 operator-(const Mat2& o) const { return {xx - o.xx, xy - o.xy, yx - o.yx, yy - o.yy}; }
  Mat2 operator*(double s) const { return {xx * s, xy * s, yx * s, yy * s}; }
  Mat2& operator+=(const Mat2& o) {
    xx += o.xx;
    xy += o.xy;
    yx += o.yx;
    yy += o.yy;
    return *this;
  }

  Vec2 apply(const Vec2& v) const { return {xx * v.x + xy * v.y, yx * v.x + yy * v.y}; }
  Mat2 transpose() const { return {xx, yx, xy, yy}; }
  double trace() const { return xx + yy; }
  double max_abs() const {
    return std::max(std::max(std::fabs(xx), std::fabs(xy)), std::max(std::fabs(yx), std::fabs(yy)));
  }
  bool symmetric(double tol) const { return std::fabs(xy - yx) <= tol; }

  /// Eigenvalues of the symmetric part; valid for symmetric matrices.
  void sym_eigenvalues(double& lo, double& hi) const {
    const double m = 0.5 * (xx + yy);
    const double off = 0.5 * (xy + yx);
    const double r = std::sqrt(0.25 * (xx - yy) * (xx - yy) + off * off);
    lo = m - r;
    hi = m + r;
  }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

/// Frobenius inner product A:B.
inline double ddot(const Mat2& a, const Mat2& b) {
  return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy;
}

}  // namespace nemel
