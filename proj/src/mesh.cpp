#include "eigenrate/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

namespace eigenrate {

namespace {

std::vector<double> graded_nodes(double a, double b, int cells, double g) {
  std::vector<double> nodes(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    const double t = double(i) / double(cells);
    nodes[i] = a + (b - a) * (g == 1.0 ? t : std::pow(t, g));
  }
  nodes[0] = a;
  nodes[cells] = b;
  return nodes;
}

double dist(const Point& p, const Point& q) { return std::hypot(p[0] - q[0], p[1] - q[1]); }

void tag_interior_subdomain(Mesh& mesh) {
  // Elements fully inside the marker box at fractional [1/4,3/4] of the domain.
  const double tol_x = 1e-12 * (mesh.hi[0] - mesh.lo[0]);
  const double glo_x = mesh.lo[0] + 0.25 * (mesh.hi[0] - mesh.lo[0]);
  const double ghi_x = mesh.lo[0] + 0.75 * (mesh.hi[0] - mesh.lo[0]);
  double glo_y = 0.0, ghi_y = 0.0, tol_y = 0.0;
  if (mesh.dim == 2) {
    tol_y = 1e-12 * (mesh.hi[1] - mesh.lo[1]);
    glo_y = mesh.lo[1] + 0.25 * (mesh.hi[1] - mesh.lo[1]);
    ghi_y = mesh.lo[1] + 0.75 * (mesh.hi[1] - mesh.lo[1]);
  }
  for (auto& el : mesh.elements) {
    bool inside = true;
    for (int v : el.verts) {
      const Point& p = mesh.vertices[v];
      if (p[0] < glo_x - tol_x || p[0] > ghi_x + tol_x) inside = false;
      if (mesh.dim == 2 && (p[1] < glo_y - tol_y || p[1] > ghi_y + tol_y)) inside = false;
    }
    el.in_G = inside;
  }
}

void mark_boundary_vertices(Mesh& mesh) {
  mesh.vertex_boundary.assign(mesh.vertices.size(), 0);
  for (const auto& f : mesh.facets)
    if (f.boundary)
      for (int v : f.verts) mesh.vertex_boundary[v] = 1;
}

// Shared edge bookkeeping for 2D meshes.
struct EdgeTable {
  std::map<std::pair<int, int>, int> index;

  int add(Mesh& mesh, int va, int vb, int elem) {
    const auto key = std::minmax(va, vb);
    auto it = index.find(key);
    if (it == index.end()) {
      Facet f;
      f.id = int(mesh.facets.size());
      f.verts = {key.first, key.second};
      f.elem[0] = elem;
      mesh.facets.push_back(f);
      index.emplace(key, f.id);
      return f.id;
    }
    Facet& f = mesh.facets[it->second];
    ensure(f.elem[1] == -1, "mesh: facet with more than two neighbors");
    f.elem[1] = elem;
    return f.id;
  }
};

void finalize_facet_boundary(Mesh& mesh) {
  for (auto& f : mesh.facets) f.boundary = (f.elem[1] == -1);
}

void set_triangle_geometry(const Mesh& mesh, Element& el) {
  const Point& p0 = mesh.vertices[el.verts[0]];
  const Point& p1 = mesh.vertices[el.verts[1]];
  const Point& p2 = mesh.vertices[el.verts[2]];
  const double a = dist(p1, p2), b = dist(p0, p2), c = dist(p0, p1);
  const double area =
      0.5 * std::abs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  el.measure = area;
  el.diam = std::max({a, b, c});
  el.tau = 4.0 * area / (a + b + c);
  double xlo = std::min({p0[0], p1[0], p2[0]}), xhi = std::max({p0[0], p1[0], p2[0]});
  double ylo = std::min({p0[1], p1[1], p2[1]}), yhi = std::max({p0[1], p1[1], p2[1]});
  el.hx = xhi - xlo;
  el.hy = yhi - ylo;
}

}  // namespace

double Mesh::h() const {
  double v = 0.0;
  for (const auto& el : elements) v = std::max(v, el.diam);
  return v;
}

double Mesh::domain_measure() const {
  double m = hi[0] - lo[0];
  if (dim == 2) m *= hi[1] - lo[1];
  return m;
}

bool Mesh::vertex_on_boundary(int v) const { return vertex_boundary[v] != 0; }

int Mesh::locate(const Point& x) const {
  const double tol = 1e-12 * std::max(hi[0] - lo[0], dim == 2 ? hi[1] - lo[1] : 0.0);
  require(x[0] >= lo[0] - tol && x[0] <= hi[0] + tol, "locate: point outside domain");
  auto cell_index = [](const std::vector<double>& nodes, double v) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), v);
    int i = int(it - nodes.begin()) - 1;
    return std::clamp(i, 0, int(nodes.size()) - 2);
  };
  const int ix = cell_index(nodes_x, x[0]);
  if (dim == 1) return ix;

  require(x[1] >= lo[1] - tol && x[1] <= hi[1] + tol, "locate: point outside domain");
  const int iy = cell_index(nodes_y, x[1]);
  const int nx = int(nodes_x.size()) - 1;
  const int rect = iy * nx + ix;
  if (kind == CellKind::Rectangle) return rect;

  // Two triangles per rectangle; pick by barycentric sign with tolerance.
  for (int t = 0; t < 2; ++t) {
    const Element& el = elements[2 * rect + t];
    const Point& p0 = vertices[el.verts[0]];
    const Point& p1 = vertices[el.verts[1]];
    const Point& p2 = vertices[el.verts[2]];
    const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    const double l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (x[1] - p0[1])) / det;
    const double l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (x[0] - p0[0]) * (p1[1] - p0[1])) / det;
    const double eps = 1e-12;
    if (l1 >= -eps && l2 >= -eps && l1 + l2 <= 1.0 + eps) return 2 * rect + t;
  }
  return 2 * rect;  // on the shared diagonal
}

Mesh interval_mesh(double a, double b, int cells, double grading) {
  require(b > a, "interval_mesh: empty interval");
  require(cells >= 1, "interval_mesh: cells must be >= 1");
  require(grading > 0.0, "interval_mesh: grading must be positive");

  Mesh mesh;
  mesh.dim = 1;
  mesh.kind = CellKind::Interval;
  mesh.lo = {a, 0.0};
  mesh.hi = {b, 0.0};
  mesh.nodes_x = graded_nodes(a, b, cells, grading);

  for (int i = 0; i <= cells; ++i) mesh.vertices.push_back({mesh.nodes_x[i], 0.0});
  // In 1D the facets are the nodes themselves.
  for (int i = 0; i <= cells; ++i) {
    Facet f;
    f.id = i;
    f.verts = {i};
    mesh.facets.push_back(f);
  }
  for (int i = 0; i < cells; ++i) {
    Element el;
    el.id = i;
    el.kind = CellKind::Interval;
    el.verts = {i, i + 1};
    el.facets = {i, i + 1};
    el.hx = mesh.nodes_x[i + 1] - mesh.nodes_x[i];
    el.diam = el.hx;
    el.tau = el.hx;
    el.measure = el.hx;
    mesh.elements.push_back(el);
  }
  // Node i separates elements i-1 and i.
  for (int i = 0; i <= cells; ++i) {
    mesh.facets[i].elem[0] = (i > 0) ? i - 1 : -1;
    mesh.facets[i].elem[1] = (i < cells) ? i : -1;
    if (mesh.facets[i].elem[0] == -1) std::swap(mesh.facets[i].elem[0], mesh.facets[i].elem[1]);
    mesh.facets[i].boundary = (i == 0 || i == cells);
  }
  mark_boundary_vertices(mesh);
  tag_interior_subdomain(mesh);
  return mesh;
}

Mesh rect_mesh(int nx, int ny, const Point& lo, const Point& hi, double grading_x,
               double grading_y) {
  require(nx >= 1 && ny >= 1, "rect_mesh: nx, ny must be >= 1");
  require(hi[0] > lo[0] && hi[1] > lo[1], "rect_mesh: degenerate box");
  require(grading_x > 0.0 && grading_y > 0.0, "rect_mesh: grading must be positive");

  Mesh mesh;
  mesh.dim = 2;
  mesh.kind = CellKind::Rectangle;
  mesh.lo = lo;
  mesh.hi = hi;
  mesh.nodes_x = graded_nodes(lo[0], hi[0], nx, grading_x);
  mesh.nodes_y = graded_nodes(lo[1], hi[1], ny, grading_y);

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({mesh.nodes_x[i], mesh.nodes_y[j]});

  EdgeTable edges;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Element el;
      el.id = j * nx + i;
      el.kind = CellKind::Rectangle;
      el.verts = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      el.hx = mesh.nodes_x[i + 1] - mesh.nodes_x[i];
      el.hy = mesh.nodes_y[j + 1] - mesh.nodes_y[j];
      el.diam = std::hypot(el.hx, el.hy);
      el.tau = std::min(el.hx, el.hy);
      el.measure = el.hx * el.hy;
      // bottom, right, top, left
      el.facets = {edges.add(mesh, el.verts[0], el.verts[1], el.id),
                   edges.add(mesh, el.verts[1], el.verts[2], el.id),
                   edges.add(mesh, el.verts[3], el.verts[2], el.id),
                   edges.add(mesh, el.verts[0], el.verts[3], el.id)};
      mesh.elements.push_back(el);
    }
  finalize_facet_boundary(mesh);
  mark_boundary_vertices(mesh);
  tag_interior_subdomain(mesh);
  return mesh;
}

Mesh tri_mesh_from_rect(const Mesh& rect, SplitRule rule) {
  require(rect.kind == CellKind::Rectangle, "tri_mesh_from_rect: input is not a rectangle mesh");

  Mesh mesh;
  mesh.dim = 2;
  mesh.kind = CellKind::Triangle;
  mesh.lo = rect.lo;
  mesh.hi = rect.hi;
  mesh.nodes_x = rect.nodes_x;
  mesh.nodes_y = rect.nodes_y;
  mesh.vertices = rect.vertices;

  const int nx = int(rect.nodes_x.size()) - 1;
  EdgeTable edges;
  for (const auto& q : rect.elements) {
    const int i = q.id % nx, j = q.id / nx;
    const int bl = q.verts[0], br = q.verts[1], tr = q.verts[2], tl = q.verts[3];
    const bool flip = (rule == SplitRule::Alternating) && ((i + j) % 2 == 1);
    int tris[2][3];
    if (!flip) {
      // diagonal bl-tr
      tris[0][0] = bl, tris[0][1] = br, tris[0][2] = tr;
      tris[1][0] = bl, tris[1][1] = tr, tris[1][2] = tl;
    } else {
      // diagonal br-tl
      tris[0][0] = bl, tris[0][1] = br, tris[0][2] = tl;
      tris[1][0] = br, tris[1][1] = tr, tris[1][2] = tl;
    }
    for (int t = 0; t < 2; ++t) {
      Element el;
      el.id = int(mesh.elements.size());
      el.kind = CellKind::Triangle;
      el.verts = {tris[t][0], tris[t][1], tris[t][2]};
      el.facets = {edges.add(mesh, el.verts[0], el.verts[1], el.id),
                   edges.add(mesh, el.verts[1], el.verts[2], el.id),
                   edges.add(mesh, el.verts[2], el.verts[0], el.id)};
      set_triangle_geometry(mesh, el);
      mesh.elements.push_back(el);
    }
  }
  finalize_facet_boundary(mesh);
  mark_boundary_vertices(mesh);
  tag_interior_subdomain(mesh);
  return mesh;
}

RegularityReport regularity(const Mesh& mesh) {
  require(!mesh.elements.empty(), "regularity: empty mesh");
  RegularityReport rep;
  rep.h = mesh.h();
  rep.sigma = mesh.elements.front().diam / mesh.elements.front().tau;
  rep.beta = 1.0;
  for (const auto& el : mesh.elements) {
    rep.sigma = std::min(rep.sigma, el.diam / el.tau);
    rep.beta = std::max(rep.beta, rep.h / el.diam);
  }
  return rep;
}

void dump_mesh_json(const Mesh& mesh, std::ostream& os) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << "{\n  \"dim\": " << mesh.dim << ",\n  \"vertices\": [";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    os << (i ? ", " : "") << "[" << num(mesh.vertices[i][0]);
    if (mesh.dim == 2) os << ", " << num(mesh.vertices[i][1]);
    os << "]";
  }
  os << "],\n  \"cells\": [";
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    os << (e ? ", " : "") << "[";
    for (std::size_t v = 0; v < mesh.elements[e].verts.size(); ++v)
      os << (v ? ", " : "") << mesh.elements[e].verts[v];
    os << "]";
  }
  os << "],\n  \"in_G\": [";
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
    os << (e ? ", " : "") << (mesh.elements[e].in_G ? 1 : 0);
  os << "],\n  \"boundary_vertices\": [";
  bool first = true;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (mesh.vertex_boundary[v]) {
      os << (first ? "" : ", ") << v;
      first = false;
    }
  os << "]\n}\n";
}

}  // namespace eigenrate
