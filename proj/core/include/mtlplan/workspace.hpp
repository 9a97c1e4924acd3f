// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtlplan::ws {

/// h . x <= a
struct Halfspace {
  Eigen::VectorXd h;
  double a = 0.0;
};

/// Intersection of halfspaces.
struct ConvexPolytope {
  std::vector<Halfspace> faces;

  int dim() const {
    return faces.empty() ? 0 : static_cast<int>(faces.front().h.size());
  }
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    for (const auto& f : faces)
      if (f.h.dot(x) > f.a + tol) return false;
    return true;
  }
};

/// Labelled union of convex parts. `z_prime` (when set) is the altitude
/// threshold backing the derived "<name>_prime" proposition.
struct Region {
  std::string name;
  std::vector<ConvexPolytope> parts;
  double z_prime = std::numeric_limits<double>::quiet_NaN();

  bool has_z_prime() const { return !std::isnan(z_prime); }
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const {
    for (const auto& p : parts)
      if (p.contains(x, tol)) return true;
    return false;
  }
};

struct WorkspaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rectangular flight volume with labelled polytopic regions.
class Workspace {
 public:
  Workspace() = default;
  Workspace(Eigen::VectorXd min_corner, Eigen::VectorXd max_corner);

  int dim() const { return static_cast<int>(min_corner_.size()); }
  const Eigen::VectorXd& min_corner() const { return min_corner_; }
  const Eigen::VectorXd& max_corner() const { return max_corner_; }

  /// Validates the region (nonempty parts, matching dimension, contained in
  /// the flight volume) before adding it.
  void add_region(Region r, bool obstacle = false);

  const std::map<std::string, Region>& regions() const { return regions_; }
  const std::vector<std::string>& obstacle_names() const { return obstacles_; }
  bool has_region(const std::string& name) const {
    return regions_.count(name) > 0;
  }
  const Region& region(const std::string& name) const;

  /// Region names whose union contains x.
  std::vector<std::string> label_point(const Eigen::VectorXd& x,
                                       double tol = 1e-9) const;

  /// Convex parts backing a proposition. "<region>_prime" resolves to the
  /// base region's parts intersected with z >= z_prime.
  std::vector<ConvexPolytope> polytopes_for(const std::string& prop) const;

  /// max over the flight volume of h.x - a (used for indicator big-Ms).
  double max_violation(const Halfspace& f) const;

 private:
  Eigen::VectorXd min_corner_, max_corner_;
  std::map<std::string, Region> regions_;
  std::vector<std::string> obstacles_;
};

/// Parses a workspace from JSON: bounds {min, max}, regions
/// [{name, parts: [[{h, a}, ...], ...], z_prime?, obstacle?}].
Workspace load_workspace(const std::string& json_text);

}  // namespace mtlplan::ws
