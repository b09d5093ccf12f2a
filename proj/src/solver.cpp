#include "steklov/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "steklov/linalg.hpp"
#include "steklov/parallel.hpp"

namespace steklov::fem {

std::vector<SymmetricSparse::Entry> SymmetricSparse::upper_entries() const {
  std::vector<Entry> out;
  for (int k = 0; k < full.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(full, k); it; ++it) {
      if (it.row() <= it.col()) out.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
    }
  }
  return out;
}

Eigen::Matrix3d local_stiffness(const std::array<Point2, 3>& p) {
  const double area = 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[1].y - p[0].y) * (p[2].x - p[0].x));
  if (!(std::abs(area) >= kMinTriangleArea)) {
    throw MeshQualityError("degenerate triangle (area " + std::to_string(area) + ")");
  }
  std::array<double, 3> b{};
  std::array<double, 3> c{};
  for (int i = 0; i < 3; ++i) {
    const auto& q1 = p[(i + 1) % 3];
    const auto& q2 = p[(i + 2) % 3];
    b[i] = q1.y - q2.y;
    c[i] = q2.x - q1.x;
  }
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = (b[i] * b[j] + c[i] * c[j]) / (4.0 * std::abs(area));
  }
  return k;
}

SymmetricSparse assemble_stiffness(const Mesh& mesh) {
  const int nt = static_cast<int>(mesh.triangles.size());
  std::vector<Eigen::Matrix3d> local(nt);
  std::vector<std::string> failure(nt);
  parallel_for(nt, [&](int t) {
    try {
      local[t] = local_stiffness(mesh.triangle_coords(t));
    } catch (const MeshQualityError& e) {
      failure[t] = e.what();
    }
  });
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    if (!failure[t].empty()) throw MeshQualityError("triangle " + std::to_string(t) + ": " + failure[t]);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], local[t](i, j));
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  SymmetricSparse out;
  out.full.resize(n, n);
  out.full.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SymmetricSparse assemble_boundary_mass(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t c = 0; c < mesh.boundary_components.size(); ++c) {
    const auto& cycle = mesh.boundary_components[c];
    const double rho0 = mesh.boundary_weights.at(c);
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      const int a = cycle[k];
      const int b = cycle[(k + 1) % cycle.size()];
      const auto d = mesh.delta(a, b);
      const double len = std::hypot(d.x, d.y);
      if (!(len > 0.0)) throw MeshQualityError("zero-length boundary edge");
      const double w = rho0 * len / 6.0;
      triplets.emplace_back(a, a, 2.0 * w);
      triplets.emplace_back(b, b, 2.0 * w);
      triplets.emplace_back(a, b, w);
      triplets.emplace_back(b, a, w);
    }
  }
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  SymmetricSparse out;
  out.full.resize(n, n);
  out.full.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

BoundaryPartition partition_boundary(const Mesh& mesh) {
  BoundaryPartition p;
  std::vector<char> on_boundary(mesh.vertices.size(), 0);
  p.component_offset.push_back(0);
  for (const auto& cycle : mesh.boundary_components) {
    for (int v : cycle) {
      p.boundary.push_back(v);
      on_boundary[v] = 1;
    }
    p.component_offset.push_back(static_cast<int>(p.boundary.size()));
  }
  for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v) {
    if (!on_boundary[v]) p.interior.push_back(v);
  }
  return p;
}

Eigen::MatrixXd restrict_dense(const SymmetricSparse& a, const std::vector<int>& index) {
  const int n = static_cast<int>(index.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = a.full.coeff(index[i], index[j]);
  }
  return out;
}

namespace {

Eigen::SparseMatrix<double> sparse_block(const Eigen::SparseMatrix<double>& a, const std::vector<int>& rows,
                                         const std::vector<int>& cols) {
  std::vector<int> row_pos(a.rows(), -1);
  std::vector<int> col_pos(a.cols(), -1);
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) row_pos[rows[i]] = i;
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) col_pos[cols[j]] = j;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
      const int r = row_pos[it.row()];
      const int c = col_pos[it.col()];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  Eigen::SparseMatrix<double> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace

InteriorSolve::InteriorSolve(const SymmetricSparse& stiffness, const BoundaryPartition& partition) {
  const auto& bnd = partition.boundary;
  const auto& inner = partition.interior;
  if (bnd.empty()) throw SolverError("mesh has no boundary nodes");
  dtn_ = restrict_dense(stiffness, bnd);
  transfer_.resize(static_cast<Eigen::Index>(inner.size()), static_cast<Eigen::Index>(bnd.size()));
  if (inner.empty()) return;

  const Eigen::SparseMatrix<double> a_ii = sparse_block(stiffness.full, inner, inner);
  const Eigen::SparseMatrix<double> a_ib = sparse_block(stiffness.full, inner, bnd);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> chol(a_ii);
  if (chol.info() != Eigen::Success) {
    throw SolverError("interior block is singular: mesh is disconnected or has an interior component without boundary");
  }
  transfer_ = chol.solve(Eigen::MatrixXd(a_ib));
  if (chol.info() != Eigen::Success) throw SolverError("interior solve failed");
  dtn_ -= Eigen::MatrixXd(a_ib.transpose() * transfer_);
  dtn_ = 0.5 * (dtn_ + dtn_.transpose()).eval();
}

Eigen::VectorXd InteriorSolve::extend(const Eigen::VectorXd& boundary_values) const {
  return -(transfer_ * boundary_values);
}

Eigen::MatrixXd schur_dtn(const SymmetricSparse& stiffness, const BoundaryPartition& partition) {
  return InteriorSolve(stiffness, partition).dtn();
}

Eigen::VectorXd harmonic_extension(const SymmetricSparse& stiffness, const BoundaryPartition& partition,
                                   const Eigen::VectorXd& boundary_values) {
  return InteriorSolve(stiffness, partition).extend(boundary_values);
}

std::vector<EigenPair> solve_pencil(const Eigen::MatrixXd& S, const Eigen::MatrixXd& M, int count, double rtol_eig) {
  const auto n = S.rows();
  if (S.cols() != n || M.rows() != n || M.cols() != n) throw std::invalid_argument("solve_pencil: dimension mismatch");
  if (count < 0) throw std::invalid_argument("solve_pencil: negative count");
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw SolverError("Cholesky of the boundary mass matrix failed");
  const Eigen::MatrixXd lower = llt.matrixL();

  // C = L^{-1} S L^{-T}
  const Eigen::MatrixXd left = lower.triangularView<Eigen::Lower>().solve(S);
  Eigen::MatrixXd reduced = lower.triangularView<Eigen::Lower>().solve(left.transpose());
  reduced = 0.5 * (reduced + reduced.transpose()).eval();

  const auto eig = linalg::symmetric_eigen(reduced);
  const int take = static_cast<int>(std::min<Eigen::Index>(count, n));
  const double s_norm = S.cwiseAbs().rowwise().sum().maxCoeff();
  const double m_norm = M.cwiseAbs().rowwise().sum().maxCoeff();

  std::vector<EigenPair> out;
  out.reserve(take);
  for (int k = 0; k < take; ++k) {
    EigenPair pair;
    pair.sigma = eig.values[k];
    pair.vector = lower.transpose().triangularView<Eigen::Upper>().solve(eig.vectors.col(k));
    const double scale = pair.vector.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(pair.vector[i]) > 1e-8 * scale) {
        if (pair.vector[i] < 0) pair.vector = -pair.vector;
        break;
      }
    }
    const double residual = (S * pair.vector - pair.sigma * (M * pair.vector)).cwiseAbs().maxCoeff();
    if (residual > rtol_eig * (s_norm + std::abs(pair.sigma) * m_norm) * scale) {
      throw SolverError("eigenpair residual above rtol_eig");
    }
    out.push_back(std::move(pair));
  }
  return out;
}

Eigen::VectorXd EigenSolution::trace(int component) const {
  const int begin = partition->component_offset.at(component);
  const int end = partition->component_offset.at(component + 1);
  return boundary_values.segment(begin, end - begin);
}

Eigen::VectorXd EigenSolution::nodal_values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(mesh->vertices.size()));
  for (std::size_t i = 0; i < partition->boundary.size(); ++i) out[partition->boundary[i]] = boundary_values[i];
  for (std::size_t i = 0; i < partition->interior.size(); ++i) out[partition->interior[i]] = interior_values[i];
  return out;
}

SteklovProblem::SteklovProblem(Mesh mesh)
    : mesh_(std::make_shared<const Mesh>(std::move(mesh))),
      partition_(std::make_shared<const BoundaryPartition>(partition_boundary(*mesh_))),
      stiffness_(assemble_stiffness(*mesh_)),
      interior_(stiffness_, *partition_),
      mass_(restrict_dense(assemble_boundary_mass(*mesh_), partition_->boundary)) {}

std::vector<EigenSolution> SteklovProblem::solve(int count, const SolverConfig& config) const {
  const auto pairs = solve_pencil(dtn(), mass_, count, config.rtol_eig);
  std::vector<EigenSolution> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    EigenSolution s;
    s.sigma = p.sigma;
    s.boundary_values = p.vector;
    s.interior_values = interior_.extend(p.vector);
    s.weight_used = mesh_->boundary_weights;
    s.mesh = mesh_;
    s.partition = partition_;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<double>> boundary_gradient(const EigenSolution& eig) {
  const Mesh& mesh = *eig.mesh;
  std::vector<std::vector<double>> out;
  for (int c = 0; c < eig.component_count(); ++c) {
    const auto& cycle = mesh.boundary_components[c];
    const int m = static_cast<int>(cycle.size());
    if (m < 4) throw std::invalid_argument("boundary_gradient: component needs at least 4 nodes");
    const Eigen::VectorXd u = eig.trace(c);
    const double rho0 = eig.weight_used.at(c);
    std::vector<double> edge(m);
    for (int j = 0; j < m; ++j) {
      const auto d = mesh.delta(cycle[j], cycle[(j + 1) % m]);
      edge[j] = rho0 * std::hypot(d.x, d.y);
    }
    std::vector<double> samples(m);
    for (int j = 0; j < m; ++j) {
      const int prev = (j + m - 1) % m;
      const int next = (j + 1) % m;
      const double tangential = (u[next] - u[prev]) / (edge[prev] + edge[j]);
      const double normal = eig.sigma * u[j];
      samples[j] = std::hypot(normal, tangential);
    }
    out.push_back(std::move(samples));
  }
  return out;
}

std::vector<std::vector<int>> cluster_indices(const std::vector<double>& sigmas, double gap) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(sigmas.size()); ++i) {
    if (!groups.empty()) {
      const double first = sigmas[groups.back().front()];
      if (sigmas[i] - first <= gap * std::abs(sigmas[i])) {
        groups.back().push_back(i);
        continue;
      }
    }
    groups.push_back({i});
  }
  return groups;
}

analytic::Spectrum numeric_spectrum(const std::vector<EigenSolution>& solutions, double gap,
                                    const geometry::DomainSpec& domain) {
  std::vector<double> sigmas;
  sigmas.reserve(solutions.size());
  for (const auto& s : solutions) sigmas.push_back(s.sigma);
  analytic::Spectrum out;
  out.source = analytic::SpectrumSource::Numeric;
  out.domain = domain;
  for (const auto& group : cluster_indices(sigmas, gap)) {
    double mean = 0.0;
    for (int i : group) mean += sigmas[i];
    mean /= static_cast<double>(group.size());
    out.entries.push_back({mean, static_cast<int>(group.size()), group.front() == 0 ? "const" : "fem"});
  }
  return out;
}

}  // namespace steklov::fem
