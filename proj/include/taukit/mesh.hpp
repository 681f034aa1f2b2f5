#pragma once

#include <stdexcept>
#include <vector>

namespace taukit {

/// Time mesh 0 = t_0 < t_1 < ... < t_n = T.
class Mesh {
 public:
  explicit Mesh(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty() || points_.front() != 0.0)
      throw std::invalid_argument("Mesh: first point must be 0");
    for (std::size_t i = 1; i < points_.size(); ++i)
      if (!(points_[i] > points_[i - 1]))
        throw std::invalid_argument("Mesh: points must be strictly increasing");
  }

  static Mesh uniform(double T, int steps) {
    if (!(T > 0) || steps < 1) throw std::invalid_argument("Mesh::uniform: need T > 0, steps >= 1");
    std::vector<double> pts(steps + 1);
    for (int i = 0; i <= steps; ++i) pts[i] = T * static_cast<double>(i) / steps;
    pts.back() = T;
    return Mesh(std::move(pts));
  }

  const std::vector<double>& points() const { return points_; }
  int steps() const { return static_cast<int>(points_.size()) - 1; }
  double step(int i) const { return points_.at(i + 1) - points_.at(i); }
  double horizon() const { return points_.back(); }

  double max_step() const {
    double m = 0;
    for (int i = 0; i < steps(); ++i) m = std::max(m, step(i));
    return m;
  }

 private:
  std::vector<double> points_;
};

}  // namespace taukit
