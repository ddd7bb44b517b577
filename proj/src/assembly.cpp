#include "bandgap/assembly.hpp"

#include <array>
#include <cmath>

namespace bandgap {

namespace {

// 3-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 3> kGaussPoints = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr std::array<double, 3> kGaussWeights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

struct ElementMatrices {
  Eigen::Matrix4d K;
  Eigen::Matrix4d M;
};

// Bilinear element on [x0, x0+hx] x [y0, y0+hy], local nodes counter-clockwise
// from the lower-left corner.
ElementMatrices element_matrices(double x0, double y0, double hx, double hy, const Coefficient& rho) {
  ElementMatrices e;
  e.K.setZero();
  e.M.setZero();
  static constexpr std::array<int, 4> sx = {0, 1, 1, 0};
  static constexpr std::array<int, 4> sy = {0, 0, 1, 1};
  for (int qi = 0; qi < 3; ++qi) {
    for (int qj = 0; qj < 3; ++qj) {
      const double s = kGaussPoints[qi];
      const double t = kGaussPoints[qj];
      const double w = kGaussWeights[qi] * kGaussWeights[qj] * hx * hy;
      const double r = rho(x0 + s * hx, y0 + t * hy);
      Eigen::Vector4d N, dNx, dNy;
      for (int a = 0; a < 4; ++a) {
        const double fs = sx[a] ? s : 1.0 - s;
        const double ft = sy[a] ? t : 1.0 - t;
        const double ds = (sx[a] ? 1.0 : -1.0) / hx;
        const double dt = (sy[a] ? 1.0 : -1.0) / hy;
        N[a] = fs * ft;
        dNx[a] = ds * ft;
        dNy[a] = fs * dt;
      }
      e.K += w * (dNx * dNx.transpose() + dNy * dNy.transpose());
      e.M += (w * r) * (N * N.transpose());
    }
  }
  return e;
}

}  // namespace

Coefficient region_coefficient(const MediumSpec& spec, Region region) {
  switch (region) {
    case Region::BulkCell: return [spec](double x, double y) { return spec.bulk(x, y); };
    case Region::MirroredBulk: return [spec](double x, double y) { return spec.bulk(-x, y); };
    case Region::DefectStrip: return [spec](double x, double y) { return spec.defect(x, y); };
    case Region::FullMedium: return [spec](double x, double y) { return eval_rho(spec, x, y); };
  }
  return {};
}

AssembledPencil assemble_quasiperiodic(const StructuredMesh& mesh, const Coefficient& rho,
                                       const QuasiMomentum& beta, std::optional<double> k) {
  AssembledPencil p;
  p.beta = beta.value();
  p.k = k;
  const int nx = mesh.nx();
  const int ny = mesh.ny();
  const Complex phase_y = std::polar(1.0, beta.value() * mesh.height());
  const Complex phase_x = k ? std::polar(1.0, *k * mesh.width()) : Complex(1.0);

  // Representative node for every node, then compact numbering.
  const int nn = mesh.num_nodes();
  std::vector<int> rep(nn);
  p.weight_of_node.assign(nn, Complex(1.0));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      int ri = i;
      int rj = j;
      Complex w(1.0);
      if (j == ny) {
        rj = 0;
        w *= phase_y;
      }
      if (k && i == nx) {
        ri = 0;
        w *= phase_x;
      }
      rep[mesh.node(i, j)] = mesh.node(ri, rj);
      p.weight_of_node[mesh.node(i, j)] = w;
    }
  }
  std::vector<int> compact(nn, -1);
  int next = 0;
  for (int n = 0; n < nn; ++n)
    if (rep[n] == n) compact[n] = next++;
  p.n_dof = next;
  p.dof_of_node.resize(nn);
  for (int n = 0; n < nn; ++n) p.dof_of_node[n] = compact[rep[n]];

  if (!k) {
    for (int j = 0; j < ny; ++j) {
      p.left_dofs.push_back(p.dof_of_node[mesh.node(0, j)]);
      p.right_dofs.push_back(p.dof_of_node[mesh.node(nx, j)]);
    }
  }

  std::vector<Triplet> tk, tm;
  tk.reserve(mesh.elements.size() * 16);
  tm.reserve(mesh.elements.size() * 16);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto& el = mesh.elements[static_cast<std::size_t>(j) * nx + i];
      const auto em = element_matrices(mesh.xs[i], mesh.ys[j], mesh.xs[i + 1] - mesh.xs[i],
                                       mesh.ys[j + 1] - mesh.ys[j], rho);
      for (int a = 0; a < 4; ++a) {
        const int da = p.dof_of_node[el[a]];
        const Complex wa = std::conj(p.weight_of_node[el[a]]);
        for (int b = 0; b < 4; ++b) {
          const int db = p.dof_of_node[el[b]];
          const Complex wab = wa * p.weight_of_node[el[b]];
          tk.emplace_back(da, db, wab * em.K(a, b));
          tm.emplace_back(da, db, wab * em.M(a, b));
        }
      }
    }
  }
  p.K.resize(p.n_dof, p.n_dof);
  p.M.resize(p.n_dof, p.n_dof);
  p.K.setFromTriplets(tk.begin(), tk.end());
  p.M.setFromTriplets(tm.begin(), tm.end());
  p.K.makeCompressed();
  p.M.makeCompressed();
  return p;
}

AssembledPencil assemble_quasiperiodic(const StructuredMesh& mesh, const MediumSpec& spec,
                                       const QuasiMomentum& beta, Region region,
                                       std::optional<double> k) {
  return assemble_quasiperiodic(mesh, region_coefficient(spec, region), beta, k);
}

const std::vector<int>& trace_restriction(const AssembledPencil& pencil, Edge edge) {
  return edge == Edge::G0 ? pencil.left_dofs : pencil.right_dofs;
}

CVector restrict_to(const CVector& u, const std::vector<int>& selection) {
  CVector t(static_cast<Eigen::Index>(selection.size()));
  for (std::size_t i = 0; i < selection.size(); ++i) t[static_cast<Eigen::Index>(i)] = u[selection[i]];
  return t;
}

CVector prolong(const CVector& trace, const std::vector<int>& selection, Eigen::Index n_dof) {
  CVector u = CVector::Zero(n_dof);
  for (std::size_t i = 0; i < selection.size(); ++i) u[selection[i]] = trace[static_cast<Eigen::Index>(i)];
  return u;
}

CVector interpolate(const StructuredMesh& mesh, const AssembledPencil& pencil,
                    const std::function<Complex(double, double)>& f) {
  CVector u = CVector::Zero(pencil.n_dof);
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    // Representative nodes: not on the top edge, and not on the right edge
    // when x is periodic.
    const bool top = n / (mesh.nx() + 1) == mesh.ny();
    const bool right = n % (mesh.nx() + 1) == mesh.nx();
    if (!top && !(right && pencil.k))
      u[pencil.dof_of_node[n]] = f(mesh.x(n), mesh.y(n));
  }
  return u;
}

CVector nodal_values(const AssembledPencil& pencil, const CVector& u) {
  CVector v(static_cast<Eigen::Index>(pencil.dof_of_node.size()));
  for (std::size_t n = 0; n < pencil.dof_of_node.size(); ++n)
    v[static_cast<Eigen::Index>(n)] = pencil.weight_of_node[n] * u[pencil.dof_of_node[n]];
  return v;
}

double hermitian_defect(const SpMatrix& A) {
  const SpMatrix D = A - SpMatrix(A.adjoint());
  const double na = A.norm();
  return na > 0.0 ? D.norm() / na : 0.0;
}

}  // namespace bandgap
