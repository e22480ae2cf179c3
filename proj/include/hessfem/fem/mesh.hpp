#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace hessfem::fem {

enum class Side { Left, Right, Bottom, Top };

// Nodes with prescribed values; the value callback is evaluated at node
// coordinates when the mesh is built.
struct DirichletSpec {
  std::vector<Side> sides;
  std::function<double(double, double)> value;  // u_D(x1, x2)
};

struct NeumannSpec {
  std::vector<Side> sides;
};

struct Facet {
  std::int32_t element = 0;
  std::int32_t local_edge = 0;  // edge k joins local nodes k and (k+1)%4
};

// Structured unit-square quadrilateral mesh. Element nodes are listed
// counterclockwise; node (i,j) has id j*(nx+1)+i.
struct Mesh {
  std::int32_t nx = 0;
  std::int32_t ny = 0;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<std::int32_t, 4>> elements;
  std::vector<std::int32_t> dirichlet_nodes;  // sorted ascending
  std::vector<double> dirichlet_values;       // parallel to dirichlet_nodes
  std::vector<std::uint8_t> dirichlet_mask;   // length n_nodes
  std::vector<Facet> neumann_facets;

  std::int32_t n_nodes() const { return static_cast<std::int32_t>(nodes.size()); }
  std::int32_t n_elements() const {
    return static_cast<std::int32_t>(elements.size());
  }
  bool is_dirichlet(std::int32_t node) const {
    return dirichlet_mask[static_cast<std::size_t>(node)] != 0;
  }
};

// Sides named in both specs conflict; an empty Dirichlet set leaves the
// operator singular. Both are rejected. Corner nodes shared between a
// Dirichlet side and a Neumann side are constrained; the facet integral is
// unaffected because constrained rows are replaced during assembly.
Mesh build_unit_square_mesh(std::int32_t nx, std::int32_t ny,
                            const DirichletSpec& dirichlet,
                            const NeumannSpec& neumann);

}  // namespace hessfem::fem
