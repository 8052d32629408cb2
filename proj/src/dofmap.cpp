#include "eigenrate/dofmap.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace eigenrate {

DofMap build_dofmap(const Mesh& mesh, const ElementFamily& family, int bc_order) {
  require(family.assemblable(), family.name() + ": cannot build a DOF map (projection-only)");
  require(!mesh.elements.empty(), "build_dofmap: empty mesh");
  require(family.supports(mesh.kind), family.name() + ": family/mesh mismatch");
  require(bc_order >= 0 && bc_order <= family.m_max(), "build_dofmap: bad boundary order");

  using Key = std::tuple<int, int, int>;  // entity kind, entity id, comp
  std::map<Key, int> ids;

  struct Entry {
    Point point;
    bool on_boundary;
    int deriv_order;
  };
  std::vector<Entry> entries;
  std::vector<std::vector<Key>> cell_keys(mesh.elements.size());

  for (const auto& el : mesh.elements) {
    const auto fns = family.functionals(mesh, el.id);
    for (const auto& fn : fns) {
      const Key key{int(fn.entity), fn.entity_id, fn.comp};
      cell_keys[el.id].push_back(key);
      if (ids.count(key)) continue;
      bool on_bd = false;
      if (fn.entity == DofFunctional::Entity::Vertex)
        on_bd = mesh.vertex_on_boundary(fn.entity_id);
      else if (fn.entity == DofFunctional::Entity::FacetEntity)
        on_bd = mesh.facets[fn.entity_id].boundary;
      ids.emplace(key, int(entries.size()));
      entries.push_back({fn.point, on_bd, fn.deriv_order});
    }
  }

  // Renumber by location for a small bandwidth on structured meshes.
  std::vector<int> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Entry& ea = entries[a];
    const Entry& eb = entries[b];
    if (ea.point[1] != eb.point[1]) return ea.point[1] < eb.point[1];
    if (ea.point[0] != eb.point[0]) return ea.point[0] < eb.point[0];
    return a < b;
  });
  std::vector<int> newid(entries.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) newid[order[rank]] = int(rank);

  DofMap dm;
  dm.n_total = int(entries.size());
  dm.is_boundary.assign(dm.n_total, 0);
  dm.dof_point.resize(dm.n_total);
  dm.dof_deriv_order.resize(dm.n_total);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int g = newid[i];
    dm.dof_point[g] = entries[i].point;
    dm.dof_deriv_order[g] = entries[i].deriv_order;
    if (entries[i].on_boundary && entries[i].deriv_order < bc_order) dm.is_boundary[g] = 1;
  }
  dm.cell_dofs.resize(mesh.elements.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
    for (const auto& key : cell_keys[e]) dm.cell_dofs[e].push_back(newid[ids.at(key)]);

  dm.global_to_free.assign(dm.n_total, -1);
  for (int g = 0; g < dm.n_total; ++g)
    if (!dm.is_boundary[g]) {
      dm.global_to_free[g] = int(dm.free_to_global.size());
      dm.free_to_global.push_back(g);
    }
  dm.n_free = int(dm.free_to_global.size());
  return dm;
}

}  // namespace eigenrate
