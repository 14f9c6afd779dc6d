#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "netform/error.hpp"

namespace netform {

enum class FormKind { laplacian, laplacian_plus_mass, general };

/// Symmetric sparse matrix. Entries are kept canonically as the upper
/// triangle (row <= col); a full CSR copy backs the products.
class SparseForm {
 public:
  struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
  };

  SparseForm() = default;

  /// Entries may be given in either triangle; (i, j) and (j, i) are the
  /// same slot and duplicates are summed.
  static SparseForm from_entries(std::size_t dimension, std::vector<Entry> entries,
                                 FormKind kind = FormKind::general) {
    for (auto& e : entries) {
      if (e.row >= dimension || e.col >= dimension) throw InputError("entry outside the matrix");
      if (e.row > e.col) std::swap(e.row, e.col);
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<Entry> merged;
    for (const auto& e : entries) {
      if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
        merged.back().value += e.value;
      } else {
        merged.push_back(e);
      }
    }
    SparseForm f;
    f.dim_ = dimension;
    f.kind_ = kind;
    f.upper_ = std::move(merged);
    f.build_csr();
    return f;
  }

  std::size_t dimension() const { return dim_; }
  FormKind kind() const { return kind_; }
  const std::vector<Entry>& entries() const { return upper_; }

  double at(std::size_t i, std::size_t j) const {
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      if (cols_[k] == j) return vals_[k];
    }
    return 0.0;
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(dim_, 0.0);
    for (const auto& e : upper_) {
      if (e.row == e.col) d[e.row] = e.value;
    }
    return d;
  }

  double row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += vals_[k];
    return s;
  }

  /// |row i| in the 2-norm.
  double row_norm(std::size_t i) const {
    double s = 0.0;
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += vals_[k] * vals_[k];
    return std::sqrt(s);
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim_ || y.size() != dim_) throw InputError("dimension mismatch");
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += vals_[k] * x[cols_[k]];
      y[i] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(dim_);
    multiply(x, y);
    return y;
  }

  double quadratic(std::span<const double> x) const {
    const auto y = *this * x;
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  }

  /// Visits the stored entries of row i in column order.
  template <typename Fn>
  void for_each_in_row(std::size_t i, Fn&& fn) const {
    for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) fn(cols_[k], vals_[k]);
  }

 private:
  void build_csr() {
    std::vector<std::size_t> count(dim_ + 1, 0);
    for (const auto& e : upper_) {
      ++count[e.row];
      if (e.row != e.col) ++count[e.col];
    }
    row_start_.assign(dim_ + 1, 0);
    for (std::size_t i = 0; i < dim_; ++i) row_start_[i + 1] = row_start_[i] + count[i];
    cols_.assign(row_start_[dim_], 0);
    vals_.assign(row_start_[dim_], 0.0);
    std::vector<std::size_t> fill(row_start_.begin(), row_start_.end() - 1);
    for (const auto& e : upper_) {
      cols_[fill[e.row]] = e.col;
      vals_[fill[e.row]++] = e.value;
      if (e.row != e.col) {
        cols_[fill[e.col]] = e.row;
        vals_[fill[e.col]++] = e.value;
      }
    }
    // keep each row sorted by column so products reduce in a fixed order
    for (std::size_t i = 0; i < dim_; ++i) {
      std::vector<std::pair<std::size_t, double>> row;
      for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) row.emplace_back(cols_[k], vals_[k]);
      std::sort(row.begin(), row.end());
      for (std::size_t k = 0; k < row.size(); ++k) {
        cols_[row_start_[i] + k] = row[k].first;
        vals_[row_start_[i] + k] = row[k].second;
      }
    }
  }

  std::size_t dim_ = 0;
  FormKind kind_ = FormKind::general;
  std::vector<Entry> upper_;
  std::vector<std::size_t> row_start_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
};

struct CgResult {
  std::vector<double> x;
  double residual = 0.0;  ///< final ||Ax - b|| / ||b||
  std::size_t iterations = 0;
};

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

/// Jacobi-preconditioned conjugate gradients. Convergence is declared on
/// the true residual; when the recurrence drifts the iteration restarts
/// from the current iterate.
inline CgResult cg_solve(const SparseForm& a, std::span<const double> rhs, double tol,
                         std::size_t max_iter, std::span<const double> x0 = {}) {
  const std::size_t n = a.dimension();
  if (rhs.size() != n) throw InputError("dimension mismatch between matrix and right-hand side");
  if (!x0.empty() && x0.size() != n) throw InputError("dimension mismatch in initial guess");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");

  CgResult res;
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    return res;
  }

  auto diag = a.diagonal();
  for (double& d : diag) {
    if (!(d > 0.0)) throw ComputeError("matrix is not positive definite (nonpositive diagonal)");
  }

  res.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());

  std::vector<double> r(n), z(n), p(n), ap(n);
  auto true_residual = [&] {
    a.multiply(res.x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    return norm2(r) / bnorm;
  };

  double rel = true_residual();
  while (true) {
    if (rel <= tol) {
      res.residual = rel;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    bool restarted = false;
    while (res.iterations < max_iter) {
      a.multiply(p, ap);
      const double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
      if (!(pap > 0.0)) throw ComputeError("matrix is not positive definite");
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        res.x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      ++res.iterations;
      if (norm2(r) / bnorm <= tol) {
        rel = true_residual();
        restarted = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
      const double rz_next = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!restarted) {
      res.residual = true_residual();
      if (res.residual <= tol) return res;
      throw ComputeError("conjugate gradient did not converge in " + std::to_string(max_iter) +
                         " iterations (relative residual " + std::to_string(res.residual) + ")");
    }
  }
}

}  // namespace netform
