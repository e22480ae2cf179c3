#include "hessfem/fem/io.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace hessfem::fem {

namespace {

std::ofstream open_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("fem: cannot open " + path.string());
  return out;
}

}  // namespace

void write_nodes_text(const Mesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  for (std::int32_t i = 0; i < mesh.n_nodes(); ++i)
    out << i << ' ' << mesh.nodes[i][0] << ' ' << mesh.nodes[i][1] << '\n';
}

void write_elements_text(const Mesh& mesh, std::ostream& out) {
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const auto& c = mesh.elements[e];
    out << e << ' ' << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3]
        << '\n';
  }
}

void write_field_text(std::span<const double> field, std::ostream& out) {
  out << std::setprecision(17);
  for (double v : field) out << v << '\n';
}

void write_nodes_file(const Mesh& mesh, const std::filesystem::path& path) {
  auto out = open_or_throw(path);
  write_nodes_text(mesh, out);
}

void write_elements_file(const Mesh& mesh, const std::filesystem::path& path) {
  auto out = open_or_throw(path);
  write_elements_text(mesh, out);
}

void write_field_file(std::span<const double> field,
                      const std::filesystem::path& path) {
  auto out = open_or_throw(path);
  write_field_text(field, out);
}

}  // namespace hessfem::fem
