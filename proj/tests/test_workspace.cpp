// Polytope membership, region labeling, primed regions, big-M sizing, and
// the JSON loader.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mtlplan/workspace.hpp"

using namespace mtlplan::ws;

namespace {

Eigen::Vector3d v3(double x, double y, double z) { return {x, y, z}; }

// Axis-aligned box as a halfspace intersection.
ConvexPolytope box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  ConvexPolytope p;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(3);
    h(i) = 1.0;
    p.faces.push_back({h, hi(i)});
    h(i) = -1.0;
    p.faces.push_back({h, -lo(i)});
  }
  return p;
}

Workspace volume() {
  return Workspace(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(10, 10, 3));
}

}  // namespace

TEST_CASE("polytope membership with tolerance") {
  auto p = box(v3(1, 1, 0), v3(3, 3, 2));
  CHECK(p.contains(v3(2, 2, 1)));
  CHECK(p.contains(v3(3, 3, 2)));           // boundary included
  CHECK(p.contains(v3(3.0 + 1e-10, 3, 2))); // within tolerance
  CHECK_FALSE(p.contains(v3(3.1, 2, 1)));
  CHECK_FALSE(p.contains(v3(2, 0.5, 1)));
}

TEST_CASE("region with several parts is their union") {
  Region r;
  r.name = "R";
  r.parts.push_back(box(v3(0, 0, 0), v3(1, 1, 1)));
  r.parts.push_back(box(v3(5, 5, 0), v3(6, 6, 1)));
  CHECK(r.contains(v3(0.5, 0.5, 0.5)));
  CHECK(r.contains(v3(5.5, 5.5, 0.5)));
  CHECK_FALSE(r.contains(v3(3, 3, 0.5)));
}

TEST_CASE("label_point returns every covering region") {
  auto w = volume();
  Region a;
  a.name = "A";
  a.parts.push_back(box(v3(0, 0, 0), v3(4, 4, 2)));
  w.add_region(std::move(a));
  Region b;
  b.name = "B";
  b.parts.push_back(box(v3(2, 2, 0), v3(6, 6, 2)));
  w.add_region(std::move(b));

  auto at3 = w.label_point(v3(3, 3, 1));
  CHECK(at3 == std::vector<std::string>{"A", "B"});
  CHECK(w.label_point(v3(5, 5, 1)) == std::vector<std::string>{"B"});
  CHECK(w.label_point(v3(9, 9, 1)).empty());
}

TEST_CASE("primed proposition adds the altitude face") {
  auto w = volume();
  Region a;
  a.name = "A";
  a.parts.push_back(box(v3(0, 0, 0), v3(4, 4, 3)));
  a.z_prime = 1.5;
  w.add_region(std::move(a));

  auto parts = w.polytopes_for("A_prime");
  REQUIRE(parts.size() == 1);
  // One extra face -z <= -z_prime on top of the box's six.
  CHECK(parts[0].faces.size() == 7);
  CHECK(parts[0].contains(v3(2, 2, 2)));
  CHECK_FALSE(parts[0].contains(v3(2, 2, 1)));  // below the threshold

  // Base proposition is unchanged.
  CHECK(w.polytopes_for("A")[0].contains(v3(2, 2, 1)));

  CHECK_THROWS_AS((void)w.polytopes_for("missing"), WorkspaceError);
}

TEST_CASE("max_violation matches corner arithmetic") {
  auto w = volume();
  // h = (1, 0, 0), a = 4: max over the box of x - 4 is 10 - 4.
  Eigen::VectorXd h = Eigen::VectorXd::Zero(3);
  h(0) = 1.0;
  CHECK(w.max_violation({h, 4.0}) == doctest::Approx(6.0));
  // Mixed signs pick the maximizing corner per coordinate:
  // max of x - y - 2 is 10 - 0 - 2.
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
  g(0) = 1.0;
  g(1) = -1.0;
  CHECK(w.max_violation({g, 2.0}) == doctest::Approx(8.0));
}

TEST_CASE("add_region validation") {
  auto w = volume();
  Region empty;
  empty.name = "E";
  CHECK_THROWS_AS(w.add_region(std::move(empty)), WorkspaceError);

  Region wrongdim;
  wrongdim.name = "W";
  ConvexPolytope p2;
  Eigen::VectorXd h2(2);
  h2 << 1, 0;
  p2.faces.push_back({h2, 1.0});
  wrongdim.parts.push_back(p2);
  CHECK_THROWS_AS(w.add_region(std::move(wrongdim)), WorkspaceError);

  // A part whose intersection with the flight volume is empty is rejected.
  Region outside;
  outside.name = "O";
  outside.parts.push_back(box(v3(20, 20, 0), v3(21, 21, 1)));
  CHECK_THROWS_AS(w.add_region(std::move(outside)), WorkspaceError);

  Region ok;
  ok.name = "R";
  ok.parts.push_back(box(v3(1, 1, 0), v3(2, 2, 1)));
  w.add_region(std::move(ok));
  CHECK_THROWS_AS(w.add_region(Region{w.region("R")}), WorkspaceError);  // dup name
}

TEST_CASE("obstacle flag is tracked") {
  auto w = volume();
  Region obst;
  obst.name = "O";
  obst.parts.push_back(box(v3(4, 4, 0), v3(6, 6, 3)));
  w.add_region(std::move(obst), /*obstacle=*/true);
  REQUIRE(w.obstacle_names().size() == 1);
  CHECK(w.obstacle_names()[0] == "O");
}

TEST_CASE("JSON loader round-trips a workspace") {
  const char* text = R"({
    "bounds": {"min": [0, 0, 0], "max": [10, 10, 3]},
    "regions": [
      {"name": "A",
       "parts": [[{"h": [1, 0, 0], "a": 4},
                  {"h": [-1, 0, 0], "a": 0}]],
       "z_prime": 1.0},
      {"name": "O",
       "parts": [[{"h": [0, 1, 0], "a": 6},
                  {"h": [0, -1, 0], "a": -5}]],
       "obstacle": true}
    ]
  })";
  auto w = load_workspace(text);
  CHECK(w.dim() == 3);
  CHECK(w.min_corner()(0) == 0.0);
  CHECK(w.max_corner()(2) == 3.0);
  CHECK(w.has_region("A"));
  CHECK(w.region("A").has_z_prime());
  CHECK(w.region("A").z_prime == doctest::Approx(1.0));
  CHECK(w.obstacle_names() == std::vector<std::string>{"O"});
  CHECK(w.region("A").contains(v3(2, 5, 1)));
  CHECK_FALSE(w.region("A").contains(v3(5, 5, 1)));

  CHECK_THROWS(load_workspace("{\"bounds\": {\"min\": [0], \"max\": []}}"));
  CHECK_THROWS(load_workspace("not json"));
}
