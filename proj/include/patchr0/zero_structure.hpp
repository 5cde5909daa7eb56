#pragma once

#include <cstddef>
#include <vector>

#include "patchr0/linalg.hpp"

namespace patchr0 {

// A dispersal matrix: cooperative with zero column sums. Construction
// validates the hypothesis and caches the Frobenius block structure.
class ConnectivityMatrix {
 public:
  // Column sums must vanish within this factor of max |entry|.
  static constexpr double kColumnSumTolerance = 1e-12;

  // Throws HypothesisError("H1", ...) on a non-cooperative matrix, a column
  // sum off by more than the tolerance, or a spectral bound away from zero.
  explicit ConnectivityMatrix(Matrix l);

  // The n x n zero matrix (no dispersal).
  static ConnectivityMatrix zero(std::size_t n);

  const Matrix& matrix() const { return l_; }
  const BlockStructure& structure() const { return structure_; }
  std::size_t size() const { return static_cast<std::size_t>(l_.rows()); }

 private:
  Matrix l_;
  BlockStructure structure_;
};

struct BlockClassification {
  // Block ids (into ConnectivityMatrix::structure()) of the conservative
  // blocks, whose columns carry no off-block entries, and of the rest.
  std::vector<std::size_t> lambda0;
  std::vector<std::size_t> lambda0c;
};

BlockClassification classify_blocks(const ConnectivityMatrix& l);

// Nonnegative left/right bases of the zero eigenspace of L.
//
// P is alpha0 x n, Q is n x alpha0, both in the original patch indexing, with
// PQ = I, PL = 0, LQ = 0. Column l of Q is supported on zero_blocks[l] and
// sums to one; row l of P carries the left null vector of that block plus the
// unique nonnegative fill on the leaky blocks.
struct ZeroEigenBasis {
  std::size_t alpha0 = 0;
  BlockStructure structure;
  std::vector<std::size_t> lambda0;
  std::vector<std::size_t> lambda0c;
  // Patch indices of each conservative block, in the order of P's rows.
  std::vector<std::vector<std::size_t>> zero_blocks;
  // Leaky blocks first (topological order), conservative blocks last.
  std::vector<std::size_t> permutation;
  Matrix connectivity;
  Matrix P;
  Matrix Q;

  std::size_t size() const { return static_cast<std::size_t>(connectivity.rows()); }
};

struct BasisResiduals {
  double pq_identity = 0.0;  // max |PQ - I|
  double pl = 0.0;           // max |PL|
  double lq = 0.0;           // max |LQ|
  double max() const;
};

BasisResiduals basis_residuals(const ZeroEigenBasis& basis);

ZeroEigenBasis build_basis(const ConnectivityMatrix& l);

// P M Q for a cooperative n x n matrix M. The output is checked for
// cooperativity.
Matrix aggregate(const ZeroEigenBasis& basis, const Matrix& m);

// P M Q without sign checks; used for Fourier coefficient matrices, which
// need not be cooperative individually.
Matrix aggregate_linear(const ZeroEigenBasis& basis, const Matrix& m);

struct Subproblem {
  // Patch indices kept, ascending: all leaky-block indices plus the selected
  // conservative blocks.
  std::vector<std::size_t> indices;
  // Restriction of L. Its column sums need not vanish when a leaky block
  // feeds an unselected conservative block, so it is kept as a plain matrix.
  Matrix L;
  Matrix M;
  ZeroEigenBasis basis;
};

// Restricts (L, M, P, Q) to the leaky blocks plus the conservative blocks
// listed in `selector` (positions into basis.zero_blocks). The aggregated
// sub-system equals the matching principal block of aggregate(basis, M).
Subproblem extract_subproblem(const ZeroEigenBasis& basis, const Matrix& m,
                              const std::vector<std::size_t>& selector);

}  // namespace patchr0
