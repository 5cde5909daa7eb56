#include "patchr0/zero_structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "patchr0/errors.hpp"

namespace patchr0 {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

ConnectivityMatrix::ConnectivityMatrix(Matrix l) : l_(std::move(l)) {
  require_square(l_, "connectivity matrix");
  if (!is_cooperative(l_)) {
    throw HypothesisError("H1", "connectivity matrix has a negative off-diagonal entry");
  }
  const double scale = max_abs(l_);
  const double tol = kColumnSumTolerance * std::max(scale, 1e-300);
  for (Index j = 0; j < l_.cols(); ++j) {
    const double sum = l_.col(j).sum();
    if (std::abs(sum) > tol) {
      throw HypothesisError("H1", "column " + std::to_string(j + 1) + " sums to " +
                                      std::to_string(sum) + " instead of 0");
    }
  }
  if (scale > 0.0 && std::abs(spectral_bound(l_)) > 1e-9 * std::max(1.0, scale)) {
    throw HypothesisError("H1", "spectral bound of connectivity matrix is not zero");
  }
  structure_ = block_structure(l_);
}

ConnectivityMatrix ConnectivityMatrix::zero(std::size_t n) {
  return ConnectivityMatrix(Matrix::Zero(idx(n), idx(n)));
}

BlockClassification classify_blocks(const ConnectivityMatrix& l) {
  const auto& bs = l.structure();
  const auto& a = l.matrix();
  BlockClassification out;
  for (std::size_t b = 0; b < bs.block_count(); ++b) {
    bool conservative = true;
    for (std::size_t j : bs.blocks[b]) {
      for (Index i = 0; i < a.rows() && conservative; ++i) {
        if (bs.block_of[static_cast<std::size_t>(i)] != b && a(i, idx(j)) != 0.0) {
          conservative = false;
        }
      }
    }
    (conservative ? out.lambda0 : out.lambda0c).push_back(b);
  }
  if (out.lambda0.empty()) {
    throw InconsistencyError("no conservative block found; a matrix with zero column sums "
                             "must have one");
  }
  return out;
}

double BasisResiduals::max() const { return std::max({pq_identity, pl, lq}); }

BasisResiduals basis_residuals(const ZeroEigenBasis& basis) {
  BasisResiduals r;
  const auto a0 = idx(basis.alpha0);
  r.pq_identity = max_abs(basis.P * basis.Q - Matrix::Identity(a0, a0));
  r.pl = max_abs(basis.P * basis.connectivity);
  r.lq = max_abs(basis.connectivity * basis.Q);
  return r;
}

ZeroEigenBasis build_basis(const ConnectivityMatrix& l) {
  const auto classes = classify_blocks(l);
  const auto& a = l.matrix();
  const auto n = l.size();

  ZeroEigenBasis basis;
  basis.structure = l.structure();
  basis.lambda0 = classes.lambda0;
  basis.lambda0c = classes.lambda0c;
  basis.alpha0 = classes.lambda0.size();
  basis.connectivity = a;
  for (std::size_t b : classes.lambda0c) {
    const auto& blk = basis.structure.blocks[b];
    basis.permutation.insert(basis.permutation.end(), blk.begin(), blk.end());
  }
  for (std::size_t b : classes.lambda0) {
    const auto& blk = basis.structure.blocks[b];
    basis.zero_blocks.push_back(blk);
    basis.permutation.insert(basis.permutation.end(), blk.begin(), blk.end());
  }

  basis.P = Matrix::Zero(idx(basis.alpha0), idx(n));
  basis.Q = Matrix::Zero(idx(n), idx(basis.alpha0));
  const double scale = std::max(1.0, max_abs(a));

  for (std::size_t l0 = 0; l0 < basis.alpha0; ++l0) {
    const auto& zb = basis.zero_blocks[l0];
    const auto pp = perron_pair(submatrix(a, zb, zb));
    for (std::size_t k = 0; k < zb.size(); ++k) {
      basis.Q(idx(zb[k]), idx(l0)) = pp.right(idx(k));
      basis.P(idx(l0), idx(zb[k])) = pp.left(idx(k));
    }

    // Solve p^T L = 0 on the leaky blocks, last to first: with p already
    // filled on every later block, block h needs p_h^T L_hh = -p^T L(:, h).
    Vector p = basis.P.row(idx(l0)).transpose();
    for (auto it = classes.lambda0c.rbegin(); it != classes.lambda0c.rend(); ++it) {
      const auto& blk = basis.structure.blocks[*it];
      Vector rhs(idx(blk.size()));
      for (std::size_t k = 0; k < blk.size(); ++k) rhs(idx(k)) = -a.col(idx(blk[k])).dot(p);
      const Matrix lhh_t = submatrix(a, blk, blk).transpose();
      Eigen::FullPivLU<Matrix> lu(lhh_t);
      if (!lu.isInvertible()) {
        throw InconsistencyError("leaky block " + std::to_string(*it + 1) +
                                 " is singular; its spectral bound should be negative");
      }
      const Vector x = lu.solve(rhs);
      for (std::size_t k = 0; k < blk.size(); ++k) {
        double v = x(idx(k));
        if (v < 0.0 && v > -1e-12 * scale) v = 0.0;
        p(idx(blk[k])) = v;
      }
    }
    basis.P.row(idx(l0)) = p.transpose();
  }

  if (basis.P.minCoeff() < 0.0 || basis.Q.minCoeff() < 0.0) {
    throw InconsistencyError("zero-eigenspace basis has a negative entry");
  }
  const auto res = basis_residuals(basis);
  if (res.max() > 1e-10 * scale) {
    throw InconsistencyError("zero-eigenspace basis assembly failed: |PQ-I|=" +
                             std::to_string(res.pq_identity) + " |PL|=" + std::to_string(res.pl) +
                             " |LQ|=" + std::to_string(res.lq));
  }
  return basis;
}

Matrix aggregate_linear(const ZeroEigenBasis& basis, const Matrix& m) {
  if (m.rows() != idx(basis.size()) || m.cols() != idx(basis.size())) {
    throw PreconditionError("aggregate: expected a " + std::to_string(basis.size()) + "x" +
                            std::to_string(basis.size()) + " matrix, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  return basis.P * m * basis.Q;
}

Matrix aggregate(const ZeroEigenBasis& basis, const Matrix& m) {
  Matrix out = aggregate_linear(basis, m);
  if (!is_cooperative(m)) throw PreconditionError("aggregate: input matrix is not cooperative");
  const double floor = 1e-13 * std::max(1.0, max_abs(m));
  for (Index j = 0; j < out.cols(); ++j) {
    for (Index i = 0; i < out.rows(); ++i) {
      if (i != j && out(i, j) < 0.0 && -out(i, j) >= floor) {
        throw InconsistencyError("aggregated matrix is not cooperative; the basis is broken");
      }
    }
  }
  return out;
}

Subproblem extract_subproblem(const ZeroEigenBasis& basis, const Matrix& m,
                              const std::vector<std::size_t>& selector) {
  if (selector.empty()) throw PreconditionError("extract_subproblem: empty block selector");
  std::vector<std::size_t> selected = selector;
  std::sort(selected.begin(), selected.end());
  if (std::adjacent_find(selected.begin(), selected.end()) != selected.end() ||
      selected.back() >= basis.alpha0) {
    throw PreconditionError("extract_subproblem: selector is not a subset of the conservative "
                            "blocks");
  }
  if (m.rows() != idx(basis.size()) || m.cols() != idx(basis.size())) {
    throw PreconditionError("extract_subproblem: dimension mismatch");
  }
  if (!is_cooperative(m)) throw PreconditionError("extract_subproblem: M is not cooperative");

  Subproblem sub;
  for (std::size_t b : basis.lambda0c) {
    const auto& blk = basis.structure.blocks[b];
    sub.indices.insert(sub.indices.end(), blk.begin(), blk.end());
  }
  for (std::size_t s : selected) {
    const auto& blk = basis.zero_blocks[s];
    sub.indices.insert(sub.indices.end(), blk.begin(), blk.end());
  }
  std::sort(sub.indices.begin(), sub.indices.end());

  // position of each kept patch inside the subproblem
  std::vector<std::size_t> local(basis.size(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < sub.indices.size(); ++k) local[sub.indices[k]] = k;

  sub.L = submatrix(basis.connectivity, sub.indices, sub.indices);
  sub.M = submatrix(m, sub.indices, sub.indices);

  auto& sb = sub.basis;
  sb.alpha0 = selected.size();
  sb.connectivity = sub.L;
  sb.structure = block_structure(sub.L);
  sb.P.resize(idx(sb.alpha0), idx(sub.indices.size()));
  sb.Q.resize(idx(sub.indices.size()), idx(sb.alpha0));
  for (std::size_t r = 0; r < selected.size(); ++r) {
    for (std::size_t k = 0; k < sub.indices.size(); ++k) {
      sb.P(idx(r), idx(k)) = basis.P(idx(selected[r]), idx(sub.indices[k]));
      sb.Q(idx(k), idx(r)) = basis.Q(idx(sub.indices[k]), idx(selected[r]));
    }
    std::vector<std::size_t> blk;
    for (std::size_t i : basis.zero_blocks[selected[r]]) blk.push_back(local[i]);
    sb.zero_blocks.push_back(std::move(blk));
  }
  std::vector<bool> is_zero_block(sb.structure.block_count(), false);
  for (const auto& blk : sb.zero_blocks) is_zero_block[sb.structure.block_of[blk.front()]] = true;
  for (std::size_t b = 0; b < sb.structure.block_count(); ++b) {
    if (is_zero_block[b]) continue;
    sb.lambda0c.push_back(b);
    const auto& blk = sb.structure.blocks[b];
    sb.permutation.insert(sb.permutation.end(), blk.begin(), blk.end());
  }
  for (const auto& blk : sb.zero_blocks) {
    sb.lambda0.push_back(sb.structure.block_of[blk.front()]);
    sb.permutation.insert(sb.permutation.end(), blk.begin(), blk.end());
  }
  return sub;
}

}  // namespace patchr0
