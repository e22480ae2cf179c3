#pragma once

#include <filesystem>
#include <ostream>
#include <span>

#include "hessfem/fem/mesh.hpp"

namespace hessfem::fem {

// Plain text snapshots for plotting: one node per line "id x y", one element
// per line "id n0 n1 n2 n3", one field value per line. Values carry full
// double precision.
void write_nodes_text(const Mesh& mesh, std::ostream& out);
void write_elements_text(const Mesh& mesh, std::ostream& out);
void write_field_text(std::span<const double> field, std::ostream& out);

void write_nodes_file(const Mesh& mesh, const std::filesystem::path& path);
void write_elements_file(const Mesh& mesh, const std::filesystem::path& path);
void write_field_file(std::span<const double> field,
                      const std::filesystem::path& path);

}  // namespace hessfem::fem
