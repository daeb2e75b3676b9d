#pragma once

#include <Eigen/Sparse>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "smtlab/mesh.hpp"
#include "smtlab/quadrature.hpp"

namespace smtlab {

class NeumannSolver;
class TriangleLocator;

/// Piecewise-linear finite element space on a mesh: assembled stiffness and
/// mass forms plus lazily built, cached services (weighted quadrature per
/// beta, the Neumann solver, point location). Immutable after construction
/// apart from the caches, which are guarded.
class FeSpace {
 public:
  static std::shared_ptr<const FeSpace> create(Mesh mesh, QuadratureOptions qopts = {});

  ~FeSpace();
  FeSpace(const FeSpace&) = delete;
  FeSpace& operator=(const FeSpace&) = delete;

  const Mesh& mesh() const { return mesh_; }
  std::size_t size() const { return mesh_.num_vertices(); }
  const Eigen::SparseMatrix<double>& stiffness() const { return stiffness_; }
  const Eigen::SparseMatrix<double>& mass() const { return mass_; }
  /// Integrals of the hat functions; lumped(i) = mass(1, phi_i).
  const Eigen::VectorXd& lumped() const { return lumped_; }
  double area() const { return area_; }
  double origin_mesh_size() const { return origin_h_; }
  double flat_radius() const { return flat_radius_; }
  const QuadratureOptions& quadrature_options() const { return qopts_; }

  const QuadratureRule& quadrature(double beta) const;
  const NeumannSolver& neumann() const;
  const TriangleLocator& locator() const;

  /// Gradient of a P1 field on triangle t.
  Point gradient(std::size_t t, const Eigen::VectorXd& values) const;

 private:
  FeSpace(Mesh mesh, QuadratureOptions qopts);

  Mesh mesh_;
  QuadratureOptions qopts_;
  Eigen::SparseMatrix<double> stiffness_;
  Eigen::SparseMatrix<double> mass_;
  Eigen::VectorXd lumped_;
  std::vector<std::array<Point, 3>> grad_basis_;  // per triangle, gradients of the three hats
  double area_ = 0.0;
  double origin_h_ = 0.0;
  double flat_radius_ = 0.0;

  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::unique_ptr<QuadratureRule>> quadrature_cache_;
  mutable std::unique_ptr<NeumannSolver> neumann_;
  mutable std::unique_ptr<TriangleLocator> locator_;
};

using SpacePtr = std::shared_ptr<const FeSpace>;

/// Solves stiffness * w = rhs with the mean-zero constraint appended as one
/// extra row/column (bordered symmetric system). Factorized once.
class NeumannSolver {
 public:
  explicit NeumannSolver(const FeSpace& space);
  ~NeumannSolver();

  struct Result {
    Eigen::VectorXd solution;  // mean-zero
    double relative_residual = 0.0;
    int refinement_steps = 0;
  };

  /// rhs must be compatible (sum of entries 0 up to rounding).
  Result solve(const Eigen::VectorXd& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  const FeSpace& space_;
};

/// Bounding-volume tree over triangles for point location.
class TriangleLocator {
 public:
  explicit TriangleLocator(const Mesh& mesh);

  struct Hit {
    int triangle = -1;
    double b1 = 0.0, b2 = 0.0;
  };
  /// Triangle containing p (with a small tolerance), or nullopt.
  std::optional<Hit> locate(Point p) const;

 private:
  struct Node {
    double xmin, ymin, xmax, ymax;
    int left = -1, right = -1;
    int begin = 0, end = 0;
  };
  int build(int begin, int end);

  const Mesh& mesh_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace smtlab
