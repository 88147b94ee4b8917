#include "stokesmg/splines.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace stokesmg {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw std::invalid_argument("KnotVector: negative degree");
  const auto p = static_cast<std::size_t>(degree_);
  if (knots_.size() < 2 * p + 2) throw std::invalid_argument("KnotVector: too few knots for degree");
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw std::invalid_argument("KnotVector: knots must be non-decreasing");
  for (std::size_t i = 0; i <= p; ++i) {
    if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0)
      throw std::invalid_argument("KnotVector: knot vector must be open on [0,1]");
  }
  for (int alpha : regularity()) {
    if (alpha < -1) throw std::invalid_argument("KnotVector: interior knot multiplicity exceeds degree + 1");
  }
}

KnotVector KnotVector::uniform(int degree, int elements) {
  if (elements < 1) throw std::invalid_argument("KnotVector::uniform: need at least one element");
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(elements + 2 * degree + 1));
  for (int i = 0; i < degree; ++i) knots.push_back(0.0);
  for (int e = 0; e <= elements; ++e) knots.push_back(static_cast<double>(e) / elements);
  for (int i = 0; i < degree; ++i) knots.push_back(1.0);
  return KnotVector(degree, std::move(knots));
}

std::vector<double> KnotVector::unique_knots() const {
  std::vector<double> result(knots_);
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

std::vector<int> KnotVector::regularity() const {
  const std::vector<double> unique = unique_knots();
  std::vector<int> result;
  result.reserve(unique.size());
  for (std::size_t j = 0; j < unique.size(); ++j) {
    if (j == 0 || j + 1 == unique.size()) {
      result.push_back(-1);
      continue;
    }
    const auto mult = std::count(knots_.begin(), knots_.end(), unique[j]);
    result.push_back(degree_ - static_cast<int>(mult));
  }
  return result;
}

Index KnotVector::num_elements() const { return static_cast<Index>(unique_knots().size()) - 1; }

Index KnotVector::find_span(double xi) const {
  const Index n = num_basis();
  if (xi >= knots_[static_cast<std::size_t>(n)]) return n - 1;
  if (xi <= knots_[static_cast<std::size_t>(degree_)]) {
    // Skip leading empty spans (only the repeated zero knots).
    Index s = degree_;
    while (knots_[static_cast<std::size_t>(s + 1)] <= xi) ++s;
    return s;
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), xi);
  return static_cast<Index>(it - knots_.begin()) - 1;
}

KnotVector KnotVector::lowered() const {
  if (degree_ == 0) throw std::invalid_argument("KnotVector::lowered: degree 0 has no derivative space");
  return KnotVector(degree_ - 1, std::vector<double>(knots_.begin() + 1, knots_.end() - 1));
}

UnivariateSpace::UnivariateSpace(KnotVector knots) : knots_(std::move(knots)) {
  if (knots_.num_basis() < knots_.degree() + 1)
    throw std::invalid_argument("UnivariateSpace: fewer than p+1 basis functions");
}

std::pair<double, double> UnivariateSpace::support(Index i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("UnivariateSpace::support: index out of range");
  return {knots_[i], knots_[i + degree() + 1]};
}

// Derivatives of the nonzero basis functions on a span (The NURBS Book, A2.3).
LocalBasis UnivariateSpace::eval_on_span(Index span, double xi, int n_ders) const {
  const int p = degree();
  const auto& U = knots_;
  LocalBasis out;
  out.first = span - p;
  out.ders = Eigen::MatrixXd::Zero(n_ders + 1, p + 1);

  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(static_cast<std::size_t>(p + 1)), right(static_cast<std::size_t>(p + 1));
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - U[span + 1 - j];
    right[j] = U[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) out.ders(0, j) = ndu(j, p);

  const int top = std::min(n_ders, p);
  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= top; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      out.ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= top; ++k) {
    out.ders.row(k) *= factor;
    factor *= (p - k);
  }
  return out;
}

LocalBasis UnivariateSpace::eval_nonzero(double xi, int n_ders) const {
  return eval_on_span(knots_.find_span(xi), xi, n_ders);
}

double UnivariateSpace::eval(Index i, double xi) const { return eval_derivative(i, xi, 0); }

double UnivariateSpace::eval_derivative(Index i, double xi, int order) const {
  if (i < 0 || i >= size()) throw std::out_of_range("UnivariateSpace: basis index out of range");
  if (order < 0 || order > degree())
    throw std::invalid_argument("UnivariateSpace: derivative order " + std::to_string(order) +
                                " exceeds degree " + std::to_string(degree()));
  if (xi < 0.0 || xi > 1.0) return 0.0;
  const LocalBasis local = eval_nonzero(xi, order);
  const Index j = i - local.first;
  if (j < 0 || j > degree()) return 0.0;
  return local.ders(order, j);
}

UnivariateSpace uniform_dyadic_refine(const UnivariateSpace& space) {
  const auto knots = space.knot_vector().knots();
  std::vector<double> refined;
  refined.reserve(knots.size() * 2);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    refined.push_back(knots[i]);
    if (i + 1 < knots.size() && knots[i + 1] > knots[i]) refined.push_back(0.5 * (knots[i] + knots[i + 1]));
  }
  return UnivariateSpace(KnotVector(space.degree(), std::move(refined)));
}

TransferMatrix knot_insertion_matrix(const UnivariateSpace& coarse, const UnivariateSpace& fine) {
  const int p = coarse.degree();
  if (fine.degree() != p) throw std::invalid_argument("knot_insertion_matrix: degrees differ");
  const auto ck = coarse.knot_vector().knots();
  const auto fk = fine.knot_vector().knots();

  std::vector<double> inserted;
  std::size_t i = 0;
  for (double x : fk) {
    if (i < ck.size() && ck[i] == x) {
      ++i;
    } else {
      inserted.push_back(x);
    }
  }
  if (i != ck.size()) throw std::invalid_argument("knot_insertion_matrix: knot vectors are not nested");

  std::vector<double> knots(ck.begin(), ck.end());
  const Index n_coarse = coarse.size();
  // Row r holds the coefficients of coarse function r in the current basis.
  Eigen::MatrixXd rows = Eigen::MatrixXd::Identity(n_coarse, n_coarse);
  for (double x : inserted) {
    const Index n = static_cast<Index>(rows.cols());
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const Index k = static_cast<Index>(it - knots.begin()) - 1;
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n_coarse, n + 1);
    for (Index j = 0; j <= n; ++j) {
      if (j <= k - p) {
        next.col(j) = rows.col(j);
      } else if (j >= k + 1) {
        next.col(j) = rows.col(j - 1);
      } else {
        const double alpha = (x - knots[j]) / (knots[j + p] - knots[j]);
        next.col(j) = alpha * rows.col(j) + (1.0 - alpha) * rows.col(j - 1);
      }
    }
    knots.insert(knots.begin() + k + 1, x);
    rows = std::move(next);
  }
  return TransferMatrix{rows.sparseView(0.0, 0.0)};
}

TransferMatrix tensor_transfer(const std::vector<TransferMatrix>& per_direction) {
  std::vector<SparseMatrix> factors;
  factors.reserve(per_direction.size());
  for (const auto& t : per_direction) factors.push_back(t.T);
  return TransferMatrix{tensor_product(factors)};
}

TensorSpace::TensorSpace(std::vector<UnivariateSpace> factors) : factors_(std::move(factors)), size_(1) {
  if (factors_.empty() || factors_.size() > 3) throw std::invalid_argument("TensorSpace: dimension must be 1..3");
  for (const auto& f : factors_) size_ *= f.size();
}

Index TensorSpace::flat(std::span<const Index> multi) const {
  Index result = 0;
  for (int k = dim() - 1; k >= 0; --k) {
    if (multi[k] < 0 || multi[k] >= extent(k)) throw std::out_of_range("TensorSpace::flat: index out of range");
    result = result * extent(k) + multi[k];
  }
  return result;
}

std::vector<Index> TensorSpace::multi(Index flat) const {
  if (flat < 0 || flat >= size_) throw std::out_of_range("TensorSpace::multi: index out of range");
  std::vector<Index> result(static_cast<std::size_t>(dim()));
  for (int k = 0; k < dim(); ++k) {
    result[k] = flat % extent(k);
    flat /= extent(k);
  }
  return result;
}

double TensorSpace::eval(Index flat_index, std::span<const double> xi) const {
  const auto m = multi(flat_index);
  double value = 1.0;
  for (int k = 0; k < dim(); ++k) value *= factor(k).eval(m[k], xi[k]);
  return value;
}

Eigen::VectorXd TensorSpace::gradient(Index flat_index, std::span<const double> xi) const {
  const auto m = multi(flat_index);
  Eigen::VectorXd values(dim()), slopes(dim());
  for (int k = 0; k < dim(); ++k) {
    values[k] = factor(k).eval(m[k], xi[k]);
    slopes[k] = factor(k).degree() > 0 ? factor(k).eval_derivative(m[k], xi[k], 1) : 0.0;
  }
  Eigen::VectorXd grad(dim());
  for (int k = 0; k < dim(); ++k) {
    double g = slopes[k];
    for (int l = 0; l < dim(); ++l) {
      if (l != k) g *= values[l];
    }
    grad[k] = g;
  }
  return grad;
}

}  // namespace stokesmg
