#include "stokesmg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stokesmg {

namespace {

SparseMatrix kron(const SparseMatrix& outer, const SparseMatrix& inner) {
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(outer.nonZeros()) * inner.nonZeros());
  for (int oc = 0; oc < outer.outerSize(); ++oc) {
    for (SparseMatrix::InnerIterator a(outer, oc); a; ++a) {
      for (int ic = 0; ic < inner.outerSize(); ++ic) {
        for (SparseMatrix::InnerIterator b(inner, ic); b; ++b) {
          entries.emplace_back(static_cast<int>(a.row() * inner.rows() + b.row()),
                               static_cast<int>(a.col() * inner.cols() + b.col()),
                               a.value() * b.value());
        }
      }
    }
  }
  SparseMatrix result(outer.rows() * inner.rows(), outer.cols() * inner.cols());
  result.setFromTriplets(entries.begin(), entries.end());
  return result;
}

}  // namespace

SparseMatrix tensor_product(const std::vector<SparseMatrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product: no factors");
  SparseMatrix result = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) result = kron(factors[k], result);
  return result;
}

SparseMatrix sparse_identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrix select(const SparseMatrix& m, const std::vector<Index>& rows,
                    const std::vector<Index>& cols) {
  std::vector<int> row_map(m.rows(), -1);
  std::vector<int> col_map(m.cols(), -1);
  Index n_rows = m.rows();
  Index n_cols = m.cols();
  if (rows.empty()) {
    for (Index i = 0; i < m.rows(); ++i) row_map[i] = static_cast<int>(i);
  } else {
    for (std::size_t i = 0; i < rows.size(); ++i) row_map[rows[i]] = static_cast<int>(i);
    n_rows = static_cast<Index>(rows.size());
  }
  if (cols.empty()) {
    for (Index j = 0; j < m.cols(); ++j) col_map[j] = static_cast<int>(j);
  } else {
    for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = static_cast<int>(j);
    n_cols = static_cast<Index>(cols.size());
  }
  std::vector<Triplet> entries;
  entries.reserve(m.nonZeros());
  for (int c = 0; c < m.outerSize(); ++c) {
    if (col_map[c] < 0) continue;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      const int r = row_map[it.row()];
      if (r >= 0) entries.emplace_back(r, col_map[c], it.value());
    }
  }
  SparseMatrix result(n_rows, n_cols);
  result.setFromTriplets(entries.begin(), entries.end());
  return result;
}

SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks) {
  Index n_rows = 0;
  Index n_cols = -1;
  std::vector<Triplet> entries;
  for (const auto& block_row : blocks) {
    Index row_height = -1;
    Index col_offset = 0;
    for (const SparseMatrix* block : block_row) {
      if (row_height < 0) row_height = block->rows();
      if (block->rows() != row_height) throw std::invalid_argument("block_matrix: ragged block row");
      for (int c = 0; c < block->outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(*block, c); it; ++it) {
          entries.emplace_back(static_cast<int>(n_rows + it.row()),
                               static_cast<int>(col_offset + c), it.value());
        }
      }
      col_offset += block->cols();
    }
    if (n_cols >= 0 && col_offset != n_cols) throw std::invalid_argument("block_matrix: ragged columns");
    n_cols = col_offset;
    n_rows += std::max<Index>(row_height, 0);
  }
  SparseMatrix result(n_rows, std::max<Index>(n_cols, 0));
  result.setFromTriplets(entries.begin(), entries.end());
  return result;
}

double max_abs(const SparseMatrix& m) {
  double result = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) result = std::max(result, std::abs(it.value()));
  }
  return result;
}

}  // namespace stokesmg
