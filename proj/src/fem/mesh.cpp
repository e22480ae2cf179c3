#include "hessfem/fem/mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace hessfem::fem {

namespace {

bool on_side(Side s, std::int32_t i, std::int32_t j, std::int32_t nx,
             std::int32_t ny) {
  switch (s) {
    case Side::Left: return i == 0;
    case Side::Right: return i == nx;
    case Side::Bottom: return j == 0;
    case Side::Top: return j == ny;
  }
  return false;
}

// Local edge k of element (i,j) lies on a mesh side only for boundary
// elements: edge 0 bottom, 1 right, 2 top, 3 left.
bool edge_on_side(Side s, std::int32_t i, std::int32_t j, std::int32_t k,
                  std::int32_t nx, std::int32_t ny) {
  switch (s) {
    case Side::Bottom: return k == 0 && j == 0;
    case Side::Right: return k == 1 && i == nx - 1;
    case Side::Top: return k == 2 && j == ny - 1;
    case Side::Left: return k == 3 && i == 0;
  }
  return false;
}

}  // namespace

Mesh build_unit_square_mesh(std::int32_t nx, std::int32_t ny,
                            const DirichletSpec& dirichlet,
                            const NeumannSpec& neumann) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("fem: mesh needs at least one element per side");
  if (dirichlet.sides.empty())
    throw std::invalid_argument("fem: empty Dirichlet set leaves the system singular");
  for (Side s : dirichlet.sides)
    if (std::find(neumann.sides.begin(), neumann.sides.end(), s) !=
        neumann.sides.end())
      throw std::invalid_argument("fem: side present in both boundary specs");
  if (!dirichlet.value)
    throw std::invalid_argument("fem: Dirichlet spec needs a value callback");

  Mesh m;
  m.nx = nx;
  m.ny = ny;
  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (std::int32_t j = 0; j <= ny; ++j)
    for (std::int32_t i = 0; i <= nx; ++i)
      m.nodes.push_back({static_cast<double>(i) / nx,
                         static_cast<double>(j) / ny});

  m.elements.reserve(static_cast<std::size_t>(nx) * ny);
  for (std::int32_t j = 0; j < ny; ++j)
    for (std::int32_t i = 0; i < nx; ++i) {
      std::int32_t n0 = j * (nx + 1) + i;
      m.elements.push_back({n0, n0 + 1, n0 + nx + 2, n0 + nx + 1});
    }

  m.dirichlet_mask.assign(m.nodes.size(), 0);
  for (std::int32_t j = 0; j <= ny; ++j)
    for (std::int32_t i = 0; i <= nx; ++i) {
      bool constrained = false;
      for (Side s : dirichlet.sides)
        constrained = constrained || on_side(s, i, j, nx, ny);
      if (constrained) {
        std::int32_t id = j * (nx + 1) + i;
        m.dirichlet_mask[id] = 1;
        m.dirichlet_nodes.push_back(id);
        m.dirichlet_values.push_back(
            dirichlet.value(m.nodes[id][0], m.nodes[id][1]));
      }
    }

  for (std::int32_t j = 0; j < ny; ++j)
    for (std::int32_t i = 0; i < nx; ++i)
      for (std::int32_t k = 0; k < 4; ++k)
        for (Side s : neumann.sides)
          if (edge_on_side(s, i, j, k, nx, ny))
            m.neumann_facets.push_back({j * nx + i, k});

  return m;
}

}  // namespace hessfem::fem
