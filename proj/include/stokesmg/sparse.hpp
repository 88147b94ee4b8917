#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace stokesmg {

using Index = std::int64_t;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Tensor product of per-direction factors with the first direction varying
/// fastest in the flat index, i.e. factors[d-1] (x) ... (x) factors[0].
SparseMatrix tensor_product(const std::vector<SparseMatrix>& factors);

SparseMatrix sparse_identity(Index n);

/// Selects rows and columns of m by index lists (an empty list keeps all).
SparseMatrix select(const SparseMatrix& m, const std::vector<Index>& rows,
                    const std::vector<Index>& cols);

/// Stacks blocks; every block in a block-row must have the same row count.
SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks);

double max_abs(const SparseMatrix& m);

}  // namespace stokesmg
