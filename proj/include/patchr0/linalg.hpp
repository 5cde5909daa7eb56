#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace patchr0 {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Frobenius normal form of a square matrix. Entry (i, j) != 0 with i != j is
// read as an edge j -> i; the blocks are the strongly connected components
// listed in a topological order of the condensation, so that the permuted
// matrix is block lower triangular with irreducible diagonal blocks.
struct BlockStructure {
  // permutation[k] is the original index placed at position k.
  std::vector<std::size_t> permutation;
  // Original indices of each block, ascending within a block.
  std::vector<std::vector<std::size_t>> blocks;
  // block_of[i] is the block containing original index i.
  std::vector<std::size_t> block_of;

  std::size_t block_count() const { return blocks.size(); }
  std::vector<std::size_t> block_sizes() const;
  bool irreducible() const { return blocks.size() == 1; }
};

// Throws PreconditionError unless `a` is a non-empty square matrix of finite
// values. `what` names the argument in the message.
void require_square(const Matrix& a, const char* what);

bool is_cooperative(const Matrix& a);
bool is_nonnegative(const Matrix& a);

// All eigenvalues from a dense real Schur decomposition, ordered by
// decreasing real part, then decreasing imaginary part.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

// Largest real part over the spectrum.
double spectral_bound(const Matrix& a);
// Largest modulus over the spectrum.
double spectral_radius(const Matrix& a);

BlockStructure block_structure(const Matrix& a);

// Returns P^T A P for the permutation (row/column k of the result is
// original index perm[k]).
Matrix permute(const Matrix& a, const std::vector<std::size_t>& perm);

// Principal submatrix on `indices` (in the given order).
Matrix submatrix(const Matrix& a, const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& cols);

struct PerronPair {
  double value = 0.0;
  Vector right;  // strictly positive, entries sum to 1
  Vector left;   // strictly positive, left.dot(right) == 1
  int iterations = 0;
};

inline constexpr int kPowerIterationCap = 100000;

// Perron eigenpair of a cooperative irreducible matrix, by power iteration on
// A + cI with c = 1 + max |a_ii|.
PerronPair perron_pair(const Matrix& a);

}  // namespace patchr0
