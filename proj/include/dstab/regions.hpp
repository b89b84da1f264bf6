#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "dstab/numerics.hpp"

namespace dstab {

/// Open region {s : [1 s]^* B [1 s] < 0} given by a real symmetric 2x2 B.
///
/// No convexity check is made on custom matrices; callers are expected to
/// supply a B that describes an open convex set.
class LmiRegion {
 public:
  enum class Kind { kLeftHalfPlane, kUnitDisk, kCustom };

  static LmiRegion lhp() {
    Eigen::Matrix2d b;
    b << 0.0, 1.0, 1.0, 0.0;
    return LmiRegion(Kind::kLeftHalfPlane, b, "lhp");
  }

  static LmiRegion unit_disk() {
    Eigen::Matrix2d b;
    b << -1.0, 0.0, 0.0, 1.0;
    return LmiRegion(Kind::kUnitDisk, b, "disk");
  }

  static LmiRegion custom(const Eigen::Matrix2d& b, std::string name = "custom") {
    if (!b.allFinite()) {
      throw std::invalid_argument("LmiRegion: non-finite entry in B");
    }
    if (b(0, 1) != b(1, 0)) {
      throw std::invalid_argument("LmiRegion: B must be symmetric");
    }
    if (b.isZero(0.0)) {
      throw std::invalid_argument("LmiRegion: B must not be zero");
    }
    return LmiRegion(Kind::kCustom, b, std::move(name));
  }

  Kind kind() const { return kind_; }
  const Eigen::Matrix2d& b() const { return b_; }
  const std::string& name() const { return name_; }

  /// b00 + 2 Re(s) b01 + |s|^2 b11; negative inside the region.
  double value(Complex s) const {
    return b_(0, 0) + 2.0 * s.real() * b_(0, 1) + std::norm(s) * b_(1, 1);
  }

  /// Strict membership; the boundary is outside.
  bool contains(Complex s) const { return value(s) < 0.0; }

  /// Worst (largest) region value over a root set; -inf when empty.
  double worst_value(std::span<const Complex> roots) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Complex& r : roots) worst = std::max(worst, value(r));
    return worst;
  }

  /// "Hurwitz", "Schur" or "D" for use in verdict text.
  std::string stability_name() const {
    switch (kind_) {
      case Kind::kLeftHalfPlane:
        return "Hurwitz";
      case Kind::kUnitDisk:
        return "Schur";
      case Kind::kCustom:
        break;
    }
    return "D";
  }

 private:
  LmiRegion(Kind kind, const Eigen::Matrix2d& b, std::string name)
      : kind_(kind), b_(b), name_(std::move(name)) {}

  Kind kind_;
  Eigen::Matrix2d b_;
  std::string name_;
};

}  // namespace dstab
