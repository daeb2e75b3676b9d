#include "smtlab/space.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smtlab/error.hpp"

namespace smtlab {

std::shared_ptr<const FeSpace> FeSpace::create(Mesh mesh, QuadratureOptions qopts) {
  return std::shared_ptr<const FeSpace>(new FeSpace(std::move(mesh), qopts));
}

FeSpace::~FeSpace() = default;

FeSpace::FeSpace(Mesh mesh, QuadratureOptions qopts) : mesh_(std::move(mesh)), qopts_(qopts) {
  check_mesh(mesh_);
  const auto n = static_cast<Eigen::Index>(mesh_.num_vertices());
  const std::size_t nt = mesh_.num_triangles();
  std::vector<Eigen::Triplet<double>> k_trip, m_trip;
  k_trip.reserve(nt * 9);
  m_trip.reserve(nt * 9);
  lumped_ = Eigen::VectorXd::Zero(n);
  grad_basis_.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[t];
    auto c = mesh_.corners(t);
    double a = signed_area(c);
    std::array<Point, 3> g;
    for (int i = 0; i < 3; ++i) {
      Point e = c[(i + 2) % 3] - c[(i + 1) % 3];
      g[i] = (1.0 / (2.0 * a)) * Point{-e.y, e.x};
    }
    grad_basis_[t] = g;
    for (int i = 0; i < 3; ++i) {
      lumped_[tri[i]] += a / 3.0;
      for (int j = 0; j < 3; ++j) {
        k_trip.emplace_back(tri[i], tri[j], a * dot(g[i], g[j]));
        m_trip.emplace_back(tri[i], tri[j], a * (i == j ? 2.0 : 1.0) / 12.0);
      }
    }
    area_ += a;
  }
  stiffness_.resize(n, n);
  stiffness_.setFromTriplets(k_trip.begin(), k_trip.end());
  mass_.resize(n, n);
  mass_.setFromTriplets(m_trip.begin(), m_trip.end());
  origin_h_ = smtlab::origin_mesh_size(mesh_);
  flat_radius_ = smtlab::flat_radius(mesh_);
}

const QuadratureRule& FeSpace::quadrature(double beta) const {
  std::lock_guard lock(cache_mutex_);
  auto it = quadrature_cache_.find(beta);
  if (it == quadrature_cache_.end())
    it = quadrature_cache_.emplace(beta, std::make_unique<QuadratureRule>(build_quadrature(mesh_, beta, qopts_)))
             .first;
  return *it->second;
}

const NeumannSolver& FeSpace::neumann() const {
  std::lock_guard lock(cache_mutex_);
  if (!neumann_) neumann_ = std::make_unique<NeumannSolver>(*this);
  return *neumann_;
}

const TriangleLocator& FeSpace::locator() const {
  std::lock_guard lock(cache_mutex_);
  if (!locator_) locator_ = std::make_unique<TriangleLocator>(mesh_);
  return *locator_;
}

Point FeSpace::gradient(std::size_t t, const Eigen::VectorXd& values) const {
  const auto& tri = mesh_.triangles[t];
  const auto& g = grad_basis_[t];
  return values[tri[0]] * g[0] + values[tri[1]] * g[1] + values[tri[2]] * g[2];
}

// ---------------------------------------------------------------------------

struct NeumannSolver::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

NeumannSolver::NeumannSolver(const FeSpace& space) : impl_(std::make_unique<Impl>()), space_(space) {
  const auto& K = space.stiffness();
  const auto n = K.rows();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K.nonZeros() + 2 * n);
  for (int k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
      trip.emplace_back(it.row(), it.col(), it.value());
  const auto& m = space.lumped();
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, n, m[i]);
    trip.emplace_back(n, i, m[i]);
  }
  Eigen::SparseMatrix<double> A(n + 1, n + 1);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  impl_->lu.analyzePattern(A);
  impl_->lu.factorize(A);
  if (impl_->lu.info() != Eigen::Success)
    fail(ErrorCode::solver, "Neumann system factorization failed: " + impl_->lu.lastErrorMessage());
}

NeumannSolver::~NeumannSolver() = default;

NeumannSolver::Result NeumannSolver::solve(const Eigen::VectorXd& rhs) const {
  const auto& K = space_.stiffness();
  const auto& m = space_.lumped();
  const auto n = K.rows();
  Eigen::VectorXd b(n + 1);
  b.head(n) = rhs;
  b[n] = 0.0;
  Result res;
  Eigen::VectorXd x = impl_->lu.solve(b);
  const double scale = std::max(rhs.norm(), 1e-300);
  auto residual = [&](const Eigen::VectorXd& sol) {
    Eigen::VectorXd r(n + 1);
    r.head(n) = b.head(n) - K * sol.head(n) - m * sol[n];
    r[n] = -m.dot(sol.head(n));
    return r;
  };
  Eigen::VectorXd r = residual(x);
  res.relative_residual = r.norm() / scale;
  while (res.relative_residual > 1e-13 && res.refinement_steps < 4) {
    x += impl_->lu.solve(r);
    r = residual(x);
    res.relative_residual = r.norm() / scale;
    ++res.refinement_steps;
  }
  if (!(res.relative_residual <= 1e-10)) {
    std::ostringstream msg;
    msg << "Neumann solve did not reach tolerance after " << res.refinement_steps
        << " refinement iterations (relative residual " << res.relative_residual << ")";
    fail(ErrorCode::solver, msg.str());
  }
  res.solution = x.head(n);
  return res;
}

// ---------------------------------------------------------------------------

TriangleLocator::TriangleLocator(const Mesh& mesh) : mesh_(mesh) {
  order_.resize(mesh.num_triangles());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  nodes_.reserve(2 * order_.size() / 4 + 1);
  if (!order_.empty()) build(0, static_cast<int>(order_.size()));
}

int TriangleLocator::build(int begin, int end) {
  Node node{};
  node.xmin = node.ymin = std::numeric_limits<double>::infinity();
  node.xmax = node.ymax = -std::numeric_limits<double>::infinity();
  for (int i = begin; i < end; ++i)
    for (int v : mesh_.triangles[order_[i]]) {
      Point p = mesh_.vertices[v];
      node.xmin = std::min(node.xmin, p.x);
      node.xmax = std::max(node.xmax, p.x);
      node.ymin = std::min(node.ymin, p.y);
      node.ymax = std::max(node.ymax, p.y);
    }
  node.begin = begin;
  node.end = end;
  int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= 8) return idx;
  bool by_x = (node.xmax - node.xmin) >= (node.ymax - node.ymin);
  auto centroid = [&](int t) {
    const auto& tri = mesh_.triangles[t];
    Point c = (1.0 / 3.0) * (mesh_.vertices[tri[0]] + mesh_.vertices[tri[1]] + mesh_.vertices[tri[2]]);
    return by_x ? c.x : c.y;
  };
  int mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return centroid(a) < centroid(b); });
  int l = build(begin, mid);
  int r = build(mid, end);
  nodes_[idx].left = l;
  nodes_[idx].right = r;
  return idx;
}

std::optional<TriangleLocator::Hit> TriangleLocator::locate(Point p) const {
  if (nodes_.empty()) return std::nullopt;
  std::vector<int> stack{0};
  std::optional<Hit> best;
  double best_slack = -std::numeric_limits<double>::infinity();
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    double pad = 1e-12 * std::max({std::abs(n.xmax - n.xmin), std::abs(n.ymax - n.ymin), 1e-300});
    if (p.x < n.xmin - pad || p.x > n.xmax + pad || p.y < n.ymin - pad || p.y > n.ymax + pad) continue;
    if (n.left >= 0) {
      stack.push_back(n.left);
      stack.push_back(n.right);
      continue;
    }
    for (int i = n.begin; i < n.end; ++i) {
      int t = order_[i];
      auto c = mesh_.corners(t);
      double a = signed_area(c);
      double b1 = 0.5 * cross(p - c[0], c[2] - c[0]) / a;
      double b2 = 0.5 * cross(c[1] - c[0], p - c[0]) / a;
      double b0 = 1.0 - b1 - b2;
      double slack = std::min({b0, b1, b2});
      if (slack > best_slack) {
        best_slack = slack;
        best = Hit{t, b1, b2};
      }
      if (slack >= 0.0) return Hit{t, b1, b2};
    }
  }
  if (best && best_slack > -1e-9) return best;
  return std::nullopt;
}

}  // namespace smtlab
