#pragma once

#include "eigenrate/core.hpp"

#include <iosfwd>
#include <vector>

namespace eigenrate {

enum class CellKind { Interval, Rectangle, Triangle };
enum class SplitRule { FixedDiagonal, Alternating };

struct Element {
  int id = -1;
  CellKind kind = CellKind::Interval;
  std::vector<int> verts;      // 2 (interval), 3 (triangle), 4 (rectangle, ccw from lower-left)
  std::vector<int> facets;     // local facet ids in canonical order
  double hx = 0.0, hy = 0.0;   // per-direction sizes (bounding box for triangles)
  double diam = 0.0;           // h_K, max pairwise vertex distance
  double tau = 0.0;            // inscribed ball diameter
  double measure = 0.0;
  bool in_G = false;           // fully inside the interior subdomain marker
};

struct Facet {
  int id = -1;
  std::vector<int> verts;      // 1 vertex in 1D, 2 in 2D
  int elem[2] = {-1, -1};
  bool boundary = false;
};

/// Shape regularity and quasi-uniformity metrics of a mesh.
struct RegularityReport {
  double sigma = 0.0;  // min_K h_K / tau_K
  double beta = 0.0;   // max_K h / h_K
  double h = 0.0;      // global mesh size
};

/// Face-to-face partition of an axis-aligned domain, 1D or 2D. Immutable
/// after construction; safe to share across threads.
struct Mesh {
  int dim = 1;
  CellKind kind = CellKind::Interval;
  std::vector<Point> vertices;
  std::vector<Element> elements;
  std::vector<Facet> facets;
  Point lo{0.0, 0.0}, hi{1.0, 0.0};      // domain bounding box
  std::vector<double> nodes_x, nodes_y;  // per-direction node coordinates
  std::vector<char> vertex_boundary;

  double h() const;
  double domain_measure() const;
  bool vertex_on_boundary(int v) const;

  /// Element containing the point (boundary-inclusive); throws if outside.
  int locate(const Point& x) const;
};

/// 1D mesh of (a,b) with `cells` elements; nodes a + (b-a)*(i/cells)^g.
Mesh interval_mesh(double a, double b, int cells, double grading = 1.0);

/// Tensor mesh of nx*ny axis-aligned rectangles with optional per-direction
/// power-law grading.
Mesh rect_mesh(int nx, int ny, const Point& lo, const Point& hi, double grading_x = 1.0,
               double grading_y = 1.0);

/// Split every rectangle of a tensor mesh into two triangles.
Mesh tri_mesh_from_rect(const Mesh& rect, SplitRule rule = SplitRule::FixedDiagonal);

RegularityReport regularity(const Mesh& mesh);

/// JSON dump (vertices, cells, boundary and interior-subdomain tags).
void dump_mesh_json(const Mesh& mesh, std::ostream& os);

}  // namespace eigenrate
