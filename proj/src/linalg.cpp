#include "patchr0/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <string>

#include "patchr0/errors.hpp"

namespace patchr0 {

std::vector<std::size_t> BlockStructure::block_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(blocks.size());
  for (const auto& b : blocks) sizes.push_back(b.size());
  return sizes;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw PreconditionError(std::string(what) + ": expected a non-empty square matrix, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  if (!a.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
  }
}

bool is_cooperative(const Matrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j && a(i, j) < 0.0) return false;
    }
  }
  return true;
}

bool is_nonnegative(const Matrix& a) { return (a.array() >= 0.0).all(); }

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  require_square(a, "eigenvalues");
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration failed to converge for a " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
  }
  const auto& ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

double spectral_bound(const Matrix& a) {
  if (a.rows() == 1) {
    require_square(a, "spectral_bound");
    return a(0, 0);
  }
  return eigenvalues(a).front().real();
}

double spectral_radius(const Matrix& a) {
  double r = 0.0;
  for (const auto& z : eigenvalues(a)) r = std::max(r, std::abs(z));
  return r;
}

namespace {

// Tarjan's algorithm over the digraph with edge j -> i iff a(i, j) != 0.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i != j && a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) {
        succ[j].push_back(i);
      }
    }
  }

  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> sccs;
  std::size_t counter = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : succ[v]) {
      if (index[w] == kUnvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w = 0;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      sccs.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == kUnvisited) visit(v);
  }
  return sccs;
}

}  // namespace

BlockStructure block_structure(const Matrix& a) {
  require_square(a, "block_structure");
  const auto n = static_cast<std::size_t>(a.rows());
  auto sccs = strongly_connected_components(a);

  std::vector<std::size_t> comp_of(n);
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    for (std::size_t v : sccs[c]) comp_of[v] = c;
  }

  // Kahn's algorithm on the condensation; ties broken by the smallest
  // original index in the component so the order is deterministic.
  std::vector<std::vector<std::size_t>> out_edges(sccs.size());
  std::vector<std::size_t> in_degree(sccs.size(), 0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j || a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0) continue;
      const auto from = comp_of[j], to = comp_of[i];
      if (from == to) continue;
      auto& edges = out_edges[from];
      if (std::find(edges.begin(), edges.end(), to) == edges.end()) {
        edges.push_back(to);
        ++in_degree[to];
      }
    }
  }
  using Entry = std::pair<std::size_t, std::size_t>;  // (min index, component)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  for (std::size_t c = 0; c < sccs.size(); ++c) {
    if (in_degree[c] == 0) ready.emplace(sccs[c].front(), c);
  }

  BlockStructure bs;
  bs.block_of.assign(n, 0);
  while (!ready.empty()) {
    const auto c = ready.top().second;
    ready.pop();
    for (std::size_t v : sccs[c]) {
      bs.block_of[v] = bs.blocks.size();
      bs.permutation.push_back(v);
    }
    bs.blocks.push_back(sccs[c]);
    for (std::size_t to : out_edges[c]) {
      if (--in_degree[to] == 0) ready.emplace(sccs[to].front(), to);
    }
  }
  return bs;
}

Matrix permute(const Matrix& a, const std::vector<std::size_t>& perm) {
  return submatrix(a, perm, perm);
}

Matrix submatrix(const Matrix& a, const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          a(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
    }
  }
  return out;
}

namespace {

// Power iteration on a nonnegative primitive matrix; iterates are kept
// sum-normalized. Returns the number of iterations used.
int power_iterate(const Matrix& b, Vector& x) {
  x = Vector::Constant(b.rows(), 1.0 / static_cast<double>(b.rows()));
  Vector next(b.rows());
  for (int it = 1; it <= kPowerIterationCap; ++it) {
    next.noalias() = b * x;
    next /= next.sum();
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x.swap(next);
    if (change < 1e-13) return it;
  }
  throw NumericalError("power iteration did not converge within " +
                       std::to_string(kPowerIterationCap) + " iterations (n=" +
                       std::to_string(b.rows()) + ")");
}

}  // namespace

PerronPair perron_pair(const Matrix& a) {
  require_square(a, "perron_pair");
  if (!is_cooperative(a)) throw PreconditionError("perron_pair: matrix is not cooperative");
  if (!block_structure(a).irreducible()) {
    throw PreconditionError("perron_pair: matrix is reducible");
  }
  PerronPair pp;
  if (a.rows() == 1) {
    pp.value = a(0, 0);
    pp.right = Vector::Ones(1);
    pp.left = Vector::Ones(1);
    return pp;
  }
  const double shift = 1.0 + a.diagonal().cwiseAbs().maxCoeff();
  const Matrix b = a + shift * Matrix::Identity(a.rows(), a.cols());
  const int right_its = power_iterate(b, pp.right);
  const Matrix bt = b.transpose();
  const int left_its = power_iterate(bt, pp.left);
  pp.iterations = std::max(right_its, left_its);

  pp.value = pp.left.dot(a * pp.right) / pp.left.dot(pp.right);
  pp.left /= pp.left.dot(pp.right);
  return pp;
}

}  // namespace patchr0
