// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "json.hpp"
#include "mtlplan/solver.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::ws {

namespace {

// Nonemptiness and containment checks via small LPs over the part's faces.
// Returns [min, max] of coordinate k over the part (empty -> infeasible).
bool part_nonempty(const ConvexPolytope& part, const Workspace& w) {
  milp::MilpModel m;
  const int d = part.dim();
  for (int k = 0; k < d; ++k)
    m.add_continuous(w.min_corner()(k), w.max_corner()(k),
                     "x" + std::to_string(k));
  for (const auto& f : part.faces) {
    std::vector<milp::LinTerm> terms;
    for (int k = 0; k < d; ++k)
      if (f.h(k) != 0.0) terms.push_back({k, f.h(k)});
    if (terms.empty()) {
      if (0.0 > f.a + 1e-12) return false;
      continue;
    }
    m.add_le(std::move(terms), f.a);
  }
  return solver::solve_lp(m).status == solver::LpStatus::Optimal;
}


}  // namespace

Workspace::Workspace(Eigen::VectorXd min_corner, Eigen::VectorXd max_corner)
    : min_corner_(std::move(min_corner)), max_corner_(std::move(max_corner)) {
  if (min_corner_.size() != max_corner_.size() || min_corner_.size() == 0)
    throw WorkspaceError("bounds corners must have equal, positive dimension");
  for (int k = 0; k < dim(); ++k)
    if (min_corner_(k) >= max_corner_(k))
      throw WorkspaceError("degenerate flight volume on axis " +
                           std::to_string(k));
}

void Workspace::add_region(Region r, bool obstacle) {
  if (r.name.empty()) throw WorkspaceError("region without a name");
  if (regions_.count(r.name))
    throw WorkspaceError("duplicate region name: " + r.name);
  if (r.parts.empty())
    throw WorkspaceError("region " + r.name + " has no parts");
  for (const auto& part : r.parts) {
    if (part.faces.empty())
      throw WorkspaceError("region " + r.name + " has a part with no faces");
    if (part.dim() != dim())
      throw WorkspaceError("region " + r.name + " has dimension " +
                           std::to_string(part.dim()) + ", workspace has " +
                           std::to_string(dim()));
    for (const auto& f : part.faces)
      if (f.h.size() != dim() || f.h.lpNorm<Eigen::Infinity>() == 0.0)
        throw WorkspaceError("region " + r.name + " has a malformed face");
    // Regions live clipped to the flight volume: each part must meet it.
    if (!part_nonempty(part, *this))
      throw WorkspaceError("region " + r.name +
                           " has a part that is empty inside the flight "
                           "volume");
  }
  if (obstacle) obstacles_.push_back(r.name);
  regions_.emplace(r.name, std::move(r));
}

const Region& Workspace::region(const std::string& name) const {
  auto it = regions_.find(name);
  if (it == regions_.end()) throw WorkspaceError("unknown region: " + name);
  return it->second;
}

std::vector<std::string> Workspace::label_point(const Eigen::VectorXd& x,
                                                double tol) const {
  std::vector<std::string> out;
  for (const auto& [name, r] : regions_)
    if (r.contains(x, tol)) out.push_back(name);
  return out;
}

std::vector<ConvexPolytope> Workspace::polytopes_for(
    const std::string& prop) const {
  static const std::string suffix = "_prime";
  if (prop.size() > suffix.size() &&
      prop.compare(prop.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const std::string base = prop.substr(0, prop.size() - suffix.size());
    const Region& r = region(base);
    if (!r.has_z_prime())
      throw WorkspaceError("region " + base + " has no altitude threshold; " +
                           prop + " is undefined");
    if (dim() < 3)
      throw WorkspaceError("primed propositions need a z axis");
    std::vector<ConvexPolytope> out = r.parts;
    Halfspace above;  // -z <= -z_prime, i.e. z >= z_prime
    above.h = Eigen::VectorXd::Zero(dim());
    above.h(2) = -1.0;
    above.a = -r.z_prime;
    for (auto& p : out) p.faces.push_back(above);
    return out;
  }
  return region(prop).parts;
}

double Workspace::max_violation(const Halfspace& f) const {
  double v = -f.a;
  for (int k = 0; k < dim(); ++k)
    v += f.h(k) > 0 ? f.h(k) * max_corner_(k) : f.h(k) * min_corner_(k);
  return v;
}

Workspace load_workspace(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw WorkspaceError(std::string("workspace JSON parse error: ") +
                         e.what());
  }
  try {
    auto to_vec = [](const nlohmann::json& a) {
      Eigen::VectorXd v(a.size());
      for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
      return v;
    };
    Workspace w(to_vec(j.at("bounds").at("min")),
                to_vec(j.at("bounds").at("max")));
    for (const auto& rj : j.at("regions")) {
      Region r;
      r.name = rj.at("name").get<std::string>();
      for (const auto& pj : rj.at("parts")) {
        ConvexPolytope p;
        for (const auto& fj : pj)
          p.faces.push_back({to_vec(fj.at("h")), fj.at("a").get<double>()});
        r.parts.push_back(std::move(p));
      }
      if (rj.contains("z_prime")) r.z_prime = rj["z_prime"].get<double>();
      w.add_region(std::move(r), rj.value("obstacle", false));
    }
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw WorkspaceError(std::string("workspace JSON schema error: ") +
                         e.what());
  }
}

}  // namespace mtlplan::ws
