#include "hessfem/fem/assembly.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "hessfem/ad/kernel.hpp"
#include "hessfem/fem/quadrature.hpp"

namespace hessfem::fem {

namespace {

constexpr int kMaxExtra = 14;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("fem: ") + what);
}

struct PointGeometry {
  double x1 = 0, x2 = 0;
  double w_detj = 0;
  std::array<double, 4> shape{};
  std::array<std::array<double, 2>, 4> grad{};  // d(phi_a)/dx
};

using ElementGeometry = std::array<PointGeometry, 4>;

struct ReferenceData {
  std::array<std::array<double, 4>, 4> shape{};
  std::array<std::array<std::array<double, 2>, 4>, 4> dshape{};
  std::array<double, 4> weight{};
};

const ReferenceData& reference_data() {
  static const ReferenceData ref = [] {
    ReferenceData r{};
    const QuadratureRule qr = gauss_2x2();
    for (int q = 0; q < 4; ++q) {
      r.shape[q] = FemBasis::shape_values(qr.points[q][0], qr.points[q][1]);
      r.dshape[q] = FemBasis::shape_gradients(qr.points[q][0], qr.points[q][1]);
      r.weight[q] = qr.weights[q];
    }
    return r;
  }();
  return ref;
}

ElementGeometry element_geometry(const Mesh& mesh, std::int32_t e) {
  const ReferenceData& ref = reference_data();
  const auto& conn = mesh.elements[e];
  std::array<std::array<double, 2>, 4> coords;
  for (int a = 0; a < 4; ++a) coords[a] = mesh.nodes[conn[a]];

  ElementGeometry geo{};
  for (int q = 0; q < 4; ++q) {
    double j11 = 0, j12 = 0, j21 = 0, j22 = 0;  // J_kl = dx_k/dxi_l
    double x1 = 0, x2 = 0;
    for (int a = 0; a < 4; ++a) {
      j11 += coords[a][0] * ref.dshape[q][a][0];
      j12 += coords[a][0] * ref.dshape[q][a][1];
      j21 += coords[a][1] * ref.dshape[q][a][0];
      j22 += coords[a][1] * ref.dshape[q][a][1];
      x1 += coords[a][0] * ref.shape[q][a];
      x2 += coords[a][1] * ref.shape[q][a];
    }
    double detj = j11 * j22 - j12 * j21;
    if (!(detj > 0.0))
      throw std::runtime_error("fem: non-positive element Jacobian");
    double i11 = j22 / detj, i12 = -j12 / detj;
    double i21 = -j21 / detj, i22 = j11 / detj;
    PointGeometry& p = geo[q];
    p.x1 = x1;
    p.x2 = x2;
    p.w_detj = ref.weight[q] * detj;
    p.shape = ref.shape[q];
    for (int a = 0; a < 4; ++a) {
      p.grad[a][0] = ref.dshape[q][a][0] * i11 + ref.dshape[q][a][1] * i21;
      p.grad[a][1] = ref.dshape[q][a][0] * i12 + ref.dshape[q][a][1] * i22;
    }
  }
  return geo;
}

// Weak-form rows of one element: r_a += w|J| (flux . grad(phi_a) + s phi_a),
// over all quadrature points. S-typed inputs carry whatever derivative
// information the caller seeded.
template <class S>
void element_weak_form(const WeakFormKernel& kernel, const ElementGeometry& geo,
                       std::span<const S> u_loc, std::span<const S> theta_loc,
                       std::span<const double> extra, std::span<S> r_loc) {
  std::array<double, 2 + kMaxExtra> data{};
  for (int q = 0; q < 4; ++q) {
    const PointGeometry& p = geo[q];
    S u(0.0), g1(0.0), g2(0.0);
    for (int a = 0; a < 4; ++a) {
      u = u + u_loc[a] * p.shape[a];
      g1 = g1 + u_loc[a] * p.grad[a][0];
      g2 = g2 + u_loc[a] * p.grad[a][1];
    }
    data[0] = p.x1;
    data[1] = p.x2;
    for (int k = 0; k < kernel.n_extra; ++k)
      data[2 + k] = extra[static_cast<std::size_t>(q) * kernel.n_extra + k];
    const S in[4] = {g1, g2, u, theta_loc[q]};
    S out[3] = {S(0.0), S(0.0), S(0.0)};
    kernel.volume(std::span<const S>(in, 4),
                  std::span<const double>(data.data(),
                                          static_cast<std::size_t>(2 + kernel.n_extra)),
                  std::span<S>(out, 3));
    for (int a = 0; a < 4; ++a)
      r_loc[a] = r_loc[a] + p.w_detj * (out[0] * p.grad[a][0] +
                                        out[1] * p.grad[a][1] +
                                        out[2] * p.shape[a]);
  }
}

// Data block layout for the per-element scalar kernel. Per quadrature point:
// x1, x2, w|J|, shape[4], grad[4][2], then the multiplier contracted with
// the test functions (value and both gradient components).
constexpr int kQpBlock = 18;

struct ScalarParts {
  const WeakFormKernel* kernel = nullptr;   // residual part, needs multiplier
  const ScalarDensity* density = nullptr;   // objective part
};

// The element-summed scalar F = integral of density + multiplier^T r as one
// eight-input kernel ([u_loc, theta_loc]); geometry and multiplier
// contractions arrive through the data channel, so one instance serves every
// element.
ad::KernelFunction element_scalar_kernel(ScalarParts parts, int n_extra_k,
                                         int n_extra_d) {
  const ad::KernelFunction* vol = parts.kernel ? &parts.kernel->volume : nullptr;
  const ad::KernelFunction* dens =
      parts.density ? &parts.density->density : nullptr;
  return ad::KernelFunction(
      8, 1,
      [vol, dens, n_extra_k, n_extra_d](auto in, std::span<const double> data,
                                        auto out) {
        using S = typename std::remove_cvref_t<decltype(out)>::element_type;
        std::array<double, 2 + kMaxExtra> kd{};
        S acc(0.0);
        for (int q = 0; q < 4; ++q) {
          const double* b = data.data() + q * kQpBlock;
          S u(0.0), g1(0.0), g2(0.0);
          for (int a = 0; a < 4; ++a) {
            u = u + in[a] * b[3 + a];
            g1 = g1 + in[a] * b[7 + 2 * a];
            g2 = g2 + in[a] * b[8 + 2 * a];
          }
          const S kin[4] = {g1, g2, u, in[4 + q]};
          kd[0] = b[0];
          kd[1] = b[1];
          if (vol != nullptr) {
            const double* ke = data.data() + 4 * kQpBlock +
                               static_cast<std::ptrdiff_t>(q) * n_extra_k;
            for (int k = 0; k < n_extra_k; ++k) kd[2 + k] = ke[k];
            S kout[3] = {S(0.0), S(0.0), S(0.0)};
            (*vol)(std::span<const S>(kin, 4),
                   std::span<const double>(kd.data(),
                                           static_cast<std::size_t>(2 + n_extra_k)),
                   std::span<S>(kout, 3));
            acc = acc + b[2] * (kout[0] * b[16] + kout[1] * b[17] +
                                kout[2] * b[15]);
          }
          if (dens != nullptr) {
            const double* de = data.data() + 4 * kQpBlock +
                               4 * static_cast<std::ptrdiff_t>(n_extra_k) +
                               static_cast<std::ptrdiff_t>(q) * n_extra_d;
            for (int k = 0; k < n_extra_d; ++k) kd[2 + k] = de[k];
            S dout[1] = {S(0.0)};
            (*dens)(std::span<const S>(kin, 4),
                    std::span<const double>(kd.data(),
                                            static_cast<std::size_t>(2 + n_extra_d)),
                    std::span<S>(dout, 1));
            acc = acc + b[2] * dout[0];
          }
        }
        out[0] = acc;
      });
}

void pack_element_data(const Mesh& mesh, std::int32_t e,
                       const ElementGeometry& geo,
                       std::span<const double> lam_masked,
                       std::span<const double> x_data, int n_extra_k,
                       std::span<const double> dens_data, int n_extra_d,
                       std::vector<double>& buf) {
  const auto& conn = mesh.elements[e];
  buf.resize(static_cast<std::size_t>(4 * kQpBlock + 4 * (n_extra_k + n_extra_d)));
  for (int q = 0; q < 4; ++q) {
    double* b = buf.data() + q * kQpBlock;
    const PointGeometry& p = geo[q];
    b[0] = p.x1;
    b[1] = p.x2;
    b[2] = p.w_detj;
    for (int a = 0; a < 4; ++a) b[3 + a] = p.shape[a];
    for (int a = 0; a < 4; ++a) {
      b[7 + 2 * a] = p.grad[a][0];
      b[8 + 2 * a] = p.grad[a][1];
    }
    double ln = 0, lg1 = 0, lg2 = 0;
    if (!lam_masked.empty()) {
      for (int a = 0; a < 4; ++a) {
        double lv = lam_masked[conn[a]];
        ln += lv * p.shape[a];
        lg1 += lv * p.grad[a][0];
        lg2 += lv * p.grad[a][1];
      }
    }
    b[15] = ln;
    b[16] = lg1;
    b[17] = lg2;
  }
  double* dst = buf.data() + 4 * kQpBlock;
  for (int q = 0; q < 4; ++q)
    for (int k = 0; k < n_extra_k; ++k)
      *dst++ = x_data[static_cast<std::size_t>(4 * e + q) * n_extra_k + k];
  for (int q = 0; q < 4; ++q)
    for (int k = 0; k < n_extra_d; ++k)
      *dst++ = dens_data[static_cast<std::size_t>(4 * e + q) * n_extra_d + k];
}

std::vector<double> masked_multiplier(const Mesh& mesh,
                                      std::span<const double> multiplier) {
  std::vector<double> lam(multiplier.begin(), multiplier.end());
  for (std::int32_t id : mesh.dirichlet_nodes) lam[id] = 0.0;
  return lam;
}

void check_common(const Mesh& mesh, const WeakFormKernel& kernel,
                  std::span<const double> y, std::span<const double> theta,
                  std::span<const double> x_data) {
  require(kernel.n_extra >= 0 && kernel.n_extra <= kMaxExtra,
          "kernel extra-data width out of range");
  require(static_cast<std::int32_t>(y.size()) == mesh.n_nodes(),
          "state length mismatch");
  require(static_cast<std::int32_t>(theta.size()) == 4 * mesh.n_elements(),
          "parameter length mismatch");
  require(static_cast<std::int32_t>(x_data.size()) ==
              kernel.n_extra * 4 * mesh.n_elements(),
          "x-data length mismatch");
}

}  // namespace

std::vector<double> assemble_residual(const Mesh& mesh,
                                      const WeakFormKernel& kernel,
                                      std::span<const double> y,
                                      std::span<const double> theta,
                                      std::span<const double> x_data) {
  check_common(mesh, kernel, y, theta, x_data);
  std::vector<double> r(y.size(), 0.0);
  std::array<double, 4> u_loc{}, r_loc{};
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    for (int a = 0; a < 4; ++a) u_loc[a] = y[conn[a]];
    r_loc = {0.0, 0.0, 0.0, 0.0};
    element_weak_form<double>(
        kernel, geo, u_loc, theta.subspan(static_cast<std::size_t>(4) * e, 4),
        x_data.subspan(static_cast<std::size_t>(4 * e) * kernel.n_extra,
                       static_cast<std::size_t>(4) * kernel.n_extra),
        r_loc);
    for (int a = 0; a < 4; ++a) r[conn[a]] += r_loc[a];
  }
  if (kernel.traction) {
    const std::vector<double> load = neumann_load(mesh, kernel.traction);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= load[i];
  }
  for (std::size_t k = 0; k < mesh.dirichlet_nodes.size(); ++k) {
    std::int32_t id = mesh.dirichlet_nodes[k];
    r[id] = y[id] - mesh.dirichlet_values[k];
  }
  for (double v : r)
    if (!std::isfinite(v))
      throw std::runtime_error("fem: non-finite residual entry");
  return r;
}

sparse::SparseMatrix assemble_jacobian(const Mesh& mesh,
                                       const WeakFormKernel& kernel,
                                       std::span<const double> y,
                                       std::span<const double> theta,
                                       std::span<const double> x_data) {
  check_common(mesh, kernel, y, theta, x_data);
  const std::int32_t n = mesh.n_nodes();
  std::vector<sparse::Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_elements()) * 16 +
                   mesh.dirichlet_nodes.size());

  std::array<ad::DualScalar, 4> u_loc, theta_loc, r_loc;
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    for (int q = 0; q < 4; ++q)
      theta_loc[q] = ad::DualScalar(theta[static_cast<std::size_t>(4) * e + q]);
    auto extra = x_data.subspan(static_cast<std::size_t>(4 * e) * kernel.n_extra,
                                static_cast<std::size_t>(4) * kernel.n_extra);
    for (int k = 0; k < 4; ++k) {
      for (int a = 0; a < 4; ++a)
        u_loc[a] = ad::DualScalar(y[conn[a]], a == k ? 1.0 : 0.0);
      r_loc = {ad::DualScalar(0.0), ad::DualScalar(0.0), ad::DualScalar(0.0),
               ad::DualScalar(0.0)};
      element_weak_form<ad::DualScalar>(kernel, geo, u_loc, theta_loc, extra,
                                        r_loc);
      for (int a = 0; a < 4; ++a) {
        if (mesh.is_dirichlet(conn[a])) continue;
        if (r_loc[a].tangent != 0.0)
          triplets.push_back({conn[a], conn[k], r_loc[a].tangent});
      }
    }
  }
  for (std::int32_t id : mesh.dirichlet_nodes) triplets.push_back({id, id, 1.0});
  return sparse::from_triplets(n, n, triplets);
}

std::vector<double> residual_jvp_theta(const Mesh& mesh,
                                       const WeakFormKernel& kernel,
                                       std::span<const double> y,
                                       std::span<const double> theta,
                                       std::span<const double> x_data,
                                       std::span<const double> that) {
  check_common(mesh, kernel, y, theta, x_data);
  require(that.size() == theta.size(), "seed length mismatch");
  std::vector<double> out(y.size(), 0.0);
  std::array<ad::DualScalar, 4> u_loc, theta_loc, r_loc;
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    for (int a = 0; a < 4; ++a) u_loc[a] = ad::DualScalar(y[conn[a]]);
    for (int q = 0; q < 4; ++q) {
      std::size_t idx = static_cast<std::size_t>(4) * e + q;
      theta_loc[q] = ad::DualScalar(theta[idx], that[idx]);
    }
    r_loc = {ad::DualScalar(0.0), ad::DualScalar(0.0), ad::DualScalar(0.0),
             ad::DualScalar(0.0)};
    element_weak_form<ad::DualScalar>(
        kernel, geo, u_loc, theta_loc,
        x_data.subspan(static_cast<std::size_t>(4 * e) * kernel.n_extra,
                       static_cast<std::size_t>(4) * kernel.n_extra),
        r_loc);
    for (int a = 0; a < 4; ++a)
      if (!mesh.is_dirichlet(conn[a])) out[conn[a]] += r_loc[a].tangent;
  }
  return out;
}

std::vector<double> residual_vjp_theta(const Mesh& mesh,
                                       const WeakFormKernel& kernel,
                                       std::span<const double> y,
                                       std::span<const double> theta,
                                       std::span<const double> x_data,
                                       std::span<const double> multiplier) {
  check_common(mesh, kernel, y, theta, x_data);
  require(multiplier.size() == y.size(), "multiplier length mismatch");
  const std::vector<double> lam = masked_multiplier(mesh, multiplier);
  const ad::KernelFunction f =
      element_scalar_kernel({&kernel, nullptr}, kernel.n_extra, 0);

  std::vector<double> out(theta.size(), 0.0);
  std::vector<double> buf;
  std::array<double, 8> x{};
  const std::array<double, 1> w = {1.0};
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    pack_element_data(mesh, e, geo, lam, x_data, kernel.n_extra, {}, 0, buf);
    for (int a = 0; a < 4; ++a) x[a] = y[conn[a]];
    for (int q = 0; q < 4; ++q) x[4 + q] = theta[static_cast<std::size_t>(4) * e + q];
    const std::vector<double> g = ad::vjp(f, x, w, buf);
    for (int q = 0; q < 4; ++q) out[static_cast<std::size_t>(4) * e + q] += g[4 + q];
  }
  return out;
}

double integrate_scalar(const Mesh& mesh, const ScalarDensity& density,
                        std::span<const double> y,
                        std::span<const double> theta,
                        std::span<const double> x_data) {
  require(density.n_extra >= 0 && density.n_extra <= kMaxExtra,
          "density extra-data width out of range");
  require(static_cast<std::int32_t>(y.size()) == mesh.n_nodes(),
          "state length mismatch");
  require(static_cast<std::int32_t>(theta.size()) == 4 * mesh.n_elements(),
          "parameter length mismatch");
  require(static_cast<std::int32_t>(x_data.size()) ==
              density.n_extra * 4 * mesh.n_elements(),
          "x-data length mismatch");
  const ad::KernelFunction f =
      element_scalar_kernel({nullptr, &density}, 0, density.n_extra);

  double total = 0.0;
  std::vector<double> buf;
  std::array<double, 8> x{};
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    pack_element_data(mesh, e, geo, {}, {}, 0, x_data, density.n_extra, buf);
    for (int a = 0; a < 4; ++a) x[a] = y[conn[a]];
    for (int q = 0; q < 4; ++q) x[4 + q] = theta[static_cast<std::size_t>(4) * e + q];
    total += ad::eval(f, x, buf)[0];
  }
  return total;
}

std::pair<std::vector<double>, std::vector<double>> density_gradients(
    const Mesh& mesh, const ScalarDensity& density, std::span<const double> y,
    std::span<const double> theta, std::span<const double> x_data) {
  require(static_cast<std::int32_t>(x_data.size()) ==
              density.n_extra * 4 * mesh.n_elements(),
          "x-data length mismatch");
  const ad::KernelFunction f =
      element_scalar_kernel({nullptr, &density}, 0, density.n_extra);

  std::vector<double> gy(y.size(), 0.0), gt(theta.size(), 0.0);
  std::vector<double> buf;
  std::array<double, 8> x{};
  const std::array<double, 1> w = {1.0};
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    pack_element_data(mesh, e, geo, {}, {}, 0, x_data, density.n_extra, buf);
    for (int a = 0; a < 4; ++a) x[a] = y[conn[a]];
    for (int q = 0; q < 4; ++q) x[4 + q] = theta[static_cast<std::size_t>(4) * e + q];
    const std::vector<double> g = ad::vjp(f, x, w, buf);
    for (int a = 0; a < 4; ++a) gy[conn[a]] += g[a];
    for (int q = 0; q < 4; ++q) gt[static_cast<std::size_t>(4) * e + q] += g[4 + q];
  }
  return {std::move(gy), std::move(gt)};
}

std::vector<double> assemble_second_order(const Mesh& mesh,
                                          const WeakFormKernel* kernel,
                                          std::span<const double> x_data,
                                          std::span<const double> y,
                                          std::span<const double> theta,
                                          const SecondOrderRequest& request,
                                          std::span<const double> seed) {
  const bool with_residual = !request.multiplier.empty();
  require(!with_residual || kernel != nullptr,
          "multiplier given without a weak-form kernel");
  require(with_residual || request.density != nullptr,
          "second-order request needs a density or a multiplier");
  const int n_extra_k = with_residual ? kernel->n_extra : 0;
  const int n_extra_d = request.density ? request.density->n_extra : 0;
  require(static_cast<std::int32_t>(y.size()) == mesh.n_nodes(),
          "state length mismatch");
  require(static_cast<std::int32_t>(theta.size()) == 4 * mesh.n_elements(),
          "parameter length mismatch");
  if (with_residual) {
    require(request.multiplier.size() == y.size(), "multiplier length mismatch");
    require(static_cast<std::int32_t>(x_data.size()) ==
                n_extra_k * 4 * mesh.n_elements(),
            "x-data length mismatch");
  }
  if (request.density)
    require(static_cast<std::int32_t>(request.density_data.size()) ==
                n_extra_d * 4 * mesh.n_elements(),
            "density data length mismatch");
  const std::size_t seed_len =
      request.seed_slot == Slot::State ? y.size() : theta.size();
  require(seed.size() == seed_len, "seed length mismatch");

  const std::vector<double> lam =
      with_residual ? masked_multiplier(mesh, request.multiplier)
                    : std::vector<double>();
  const ad::KernelFunction f = element_scalar_kernel(
      {with_residual ? kernel : nullptr, request.density}, n_extra_k, n_extra_d);

  std::vector<double> out(
      request.out_slot == Slot::State ? y.size() : theta.size(), 0.0);
  std::vector<double> buf;
  std::array<double, 8> x{}, d{};
  const std::array<double, 1> w = {1.0};
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    const auto& conn = mesh.elements[e];
    pack_element_data(mesh, e, geo, lam, x_data, n_extra_k,
                      request.density_data, n_extra_d, buf);
    for (int a = 0; a < 4; ++a) x[a] = y[conn[a]];
    for (int q = 0; q < 4; ++q) x[4 + q] = theta[static_cast<std::size_t>(4) * e + q];
    d = {};
    if (request.seed_slot == Slot::State) {
      for (int a = 0; a < 4; ++a) d[a] = seed[conn[a]];
    } else {
      for (int q = 0; q < 4; ++q) d[4 + q] = seed[static_cast<std::size_t>(4) * e + q];
    }
    const std::vector<double> h =
        ad::second_order_grad(f, x, w, d, request.mode, buf);
    if (request.out_slot == Slot::State) {
      for (int a = 0; a < 4; ++a) out[conn[a]] += h[a];
    } else {
      for (int q = 0; q < 4; ++q)
        out[static_cast<std::size_t>(4) * e + q] += h[4 + q];
    }
  }
  return out;
}

std::vector<double> interpolate_to_quad(
    const Mesh& mesh, const std::function<double(double, double)>& f) {
  require(static_cast<bool>(f), "interpolation needs a callback");
  std::vector<double> out(static_cast<std::size_t>(4) * mesh.n_elements());
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const ElementGeometry geo = element_geometry(mesh, e);
    for (int q = 0; q < 4; ++q)
      out[static_cast<std::size_t>(4) * e + q] = f(geo[q].x1, geo[q].x2);
  }
  return out;
}

std::vector<double> nodal_to_quad(const Mesh& mesh,
                                  std::span<const double> nodal) {
  require(nodal.size() == mesh.nodes.size(), "nodal field length mismatch");
  const ReferenceData& ref = reference_data();
  std::vector<double> out(static_cast<std::size_t>(4) * mesh.n_elements());
  for (std::int32_t e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    for (int q = 0; q < 4; ++q) {
      double v = 0.0;
      for (int a = 0; a < 4; ++a) v += nodal[conn[a]] * ref.shape[q][a];
      out[static_cast<std::size_t>(4) * e + q] = v;
    }
  }
  return out;
}

std::vector<double> neumann_load(
    const Mesh& mesh, const std::function<double(double, double)>& traction) {
  std::vector<double> load(mesh.nodes.size(), 0.0);
  if (!traction) return load;
  for (const Facet& facet : mesh.neumann_facets) {
    const auto& conn = mesh.elements[facet.element];
    std::int32_t na = conn[facet.local_edge];
    std::int32_t nb = conn[(facet.local_edge + 1) % 4];
    const auto& xa = mesh.nodes[na];
    const auto& xb = mesh.nodes[nb];
    const double h = std::hypot(xb[0] - xa[0], xb[1] - xa[1]);
    for (double s : {-kGaussPoint, kGaussPoint}) {
      const double pa = 0.5 * (1.0 - s), pb = 0.5 * (1.0 + s);
      const double x1 = pa * xa[0] + pb * xb[0];
      const double x2 = pa * xa[1] + pb * xb[1];
      const double t = traction(x1, x2);
      load[na] += 0.5 * h * t * pa;
      load[nb] += 0.5 * h * t * pb;
    }
  }
  return load;
}

}  // namespace hessfem::fem
