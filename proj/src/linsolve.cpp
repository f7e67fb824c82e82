#include "sblfem/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

namespace sblfem::linalg {

// ---------------------------------------------------------------- CSR

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw std::out_of_range("CsrMatrix: triplet index out of range");
  }
  // Stable sort keeps duplicates in insertion order, so the summation order
  // (and therefore the rounding) is fixed by the caller's assembly order.
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    std::size_t l = k;
    double sum = 0.0;
    while (l < triplets.size() && triplets[l].row == triplets[k].row && triplets[l].col == triplets[k].col)
      sum += triplets[l++].value;
    m.col_idx_.push_back(triplets[k].col);
    m.values_.push_back(sum);
    ++m.row_ptr_[triplets[k].row + 1];
    k = l;
  }
  for (std::size_t i = 0; i < rows; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
  return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("CsrMatrix::multiply: size mismatch");
  std::vector<double> y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
  return y;
}

double CsrMatrix::frobenius() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double CsrMatrix::max_asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      worst = std::max(worst, std::abs(values_[k] - at(col_idx_[k], i)));
  return worst;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> d(rows_ * cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i * cols_ + col_idx_[k]] = values_[k];
  return d;
}

// ---------------------------------------------------------------- errors

namespace {

std::string singular_message(std::size_t pivot, double ratio) {
  std::ostringstream os;
  os << "singular matrix: pivot " << pivot << " has relative size " << ratio;
  return os.str();
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SingularMatrixError::SingularMatrixError(std::size_t pivot, double ratio)
    : std::runtime_error(singular_message(pivot, ratio)), pivot_(pivot) {}

double relative_residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = a.multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double denom = a.frobenius() * norm2(x) + norm2(b);
  return denom > 0.0 ? norm2(r) / denom : 0.0;
}

// ---------------------------------------------------------------- ordering

std::vector<std::size_t> reverse_cuthill_mckee(const CsrMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const std::size_t j = a.col_index()[k];
      if (j == i) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  auto by_degree = [&](std::size_t u, std::size_t v) {
    return adj[u].size() != adj[v].size() ? adj[u].size() < adj[v].size() : u < v;
  };

  // BFS levels from `root`; returns the last level.
  std::vector<int> level(n, -1);
  auto bfs_last_level = [&](std::size_t root, std::vector<std::size_t>& comp) {
    for (std::size_t v : comp) level[v] = -1;
    std::deque<std::size_t> queue{root};
    level[root] = 0;
    std::vector<std::size_t> last;
    int depth = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      if (level[u] > depth) {
        depth = level[u];
        last.clear();
      }
      last.push_back(u);
      for (std::size_t v : adj[u])
        if (level[v] < 0) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        }
    }
    return std::make_pair(depth, last);
  };

  std::vector<char> placed(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> seeds(n);
  std::iota(seeds.begin(), seeds.end(), 0);
  std::sort(seeds.begin(), seeds.end(), by_degree);

  for (std::size_t seed : seeds) {
    if (placed[seed]) continue;
    // Collect the component, then look for a pseudo-peripheral start node.
    std::vector<std::size_t> comp{seed};
    {
      std::deque<std::size_t> queue{seed};
      std::vector<char> mark(n, 0);
      mark[seed] = 1;
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v : adj[u])
          if (!mark[v]) {
            mark[v] = 1;
            comp.push_back(v);
            queue.push_back(v);
          }
      }
    }
    std::size_t root = seed;
    auto [depth, last] = bfs_last_level(root, comp);
    for (int it = 0; it < 4; ++it) {
      const std::size_t cand = *std::min_element(last.begin(), last.end(), by_degree);
      auto [d2, l2] = bfs_last_level(cand, comp);
      if (d2 <= depth) break;
      root = cand;
      depth = d2;
      last = l2;
    }

    const std::size_t start = order.size();
    order.push_back(root);
    placed[root] = 1;
    for (std::size_t head = start; head < order.size(); ++head) {
      std::vector<std::size_t> next;
      for (std::size_t v : adj[order[head]])
        if (!placed[v]) {
          placed[v] = 1;
          next.push_back(v);
        }
      std::sort(next.begin(), next.end(), by_degree);
      order.insert(order.end(), next.begin(), next.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

std::size_t bandwidth(const CsrMatrix& a, std::span<const std::size_t> perm) {
  std::vector<std::size_t> pos(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) pos[perm[k]] = k;
  std::size_t bw = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const std::size_t pi = pos[i], pj = pos[a.col_index()[k]];
      bw = std::max(bw, pi > pj ? pi - pj : pj - pi);
    }
  return bw;
}

// ---------------------------------------------------------------- factorizations

namespace {

/// Banded Cholesky on the lower band: L stored row-wise, L(i, j) at
/// i * (bw + 1) + (j - i + bw) for i - bw <= j <= i. Returns false if a
/// pivot is not positive.
bool banded_cholesky(std::vector<double>& band, std::size_t n, std::size_t bw) {
  const std::size_t w = bw + 1;
  auto at = [&](std::size_t i, std::size_t j) -> double& { return band[i * w + (j + bw - i)]; };
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lo = j > bw ? j - bw : 0;
    double d = at(j, j);
    for (std::size_t k = lo; k < j; ++k) d -= at(j, k) * at(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    at(j, j) = ljj;
    const std::size_t hi = std::min(n - 1, j + bw);
    for (std::size_t i = j + 1; i <= hi; ++i) {
      const std::size_t lo_i = i > bw ? i - bw : 0;
      double s = at(i, j);
      for (std::size_t k = std::max(lo, lo_i); k < j; ++k) s -= at(i, k) * at(j, k);
      at(i, j) = s / ljj;
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& band, std::size_t n, std::size_t bw, std::vector<double>& x) {
  const std::size_t w = bw + 1;
  auto at = [&](std::size_t i, std::size_t j) { return band[i * w + (j + bw - i)]; };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > bw ? i - bw : 0;
    double s = x[i];
    for (std::size_t k = lo; k < i; ++k) s -= at(i, k) * x[k];
    x[i] = s / at(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const std::size_t hi = std::min(n - 1, ii + bw);
    double s = x[ii];
    for (std::size_t k = ii + 1; k <= hi; ++k) s -= at(k, ii) * x[k];
    x[ii] = s / at(ii, ii);
  }
}

/// Banded LU with scaled partial pivoting. Row i stores columns
/// [i - bw, i + 2 bw] (room for pivoting fill) at offset j - i + bw.
struct BandedLu {
  std::size_t n = 0, bw = 0, width = 0;
  std::vector<double> band;
  std::vector<std::size_t> pivots;

  double& at(std::size_t i, std::size_t j) { return band[i * width + (j + bw - i)]; }
  double at(std::size_t i, std::size_t j) const { return band[i * width + (j + bw - i)]; }

  void factor(const std::vector<double>& row_scale) {
    pivots.resize(n);
    std::vector<double> scale = row_scale;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t hi = std::min(n - 1, k + bw);
      std::size_t best = k;
      double best_ratio = -1.0;
      for (std::size_t i = k; i <= hi; ++i) {
        const double r = std::abs(at(i, k)) / scale[i];
        if (r > best_ratio) {
          best_ratio = r;
          best = i;
        }
      }
      if (!(best_ratio >= kPivotThreshold)) throw SingularMatrixError(k, best_ratio);
      pivots[k] = best;
      const std::size_t last_col = std::min(n - 1, k + 2 * bw);
      if (best != k) {
        for (std::size_t j = k; j <= last_col; ++j) std::swap(at(k, j), at(best, j));
        std::swap(scale[k], scale[best]);
      }
      const double pivot = at(k, k);
      for (std::size_t i = k + 1; i <= hi; ++i) {
        const double l = at(i, k) / pivot;
        at(i, k) = l;
        if (l == 0.0) continue;
        for (std::size_t j = k + 1; j <= last_col; ++j) at(i, j) -= l * at(k, j);
      }
    }
  }

  void solve(std::vector<double>& x) const {
    for (std::size_t k = 0; k < n; ++k) {
      if (pivots[k] != k) std::swap(x[k], x[pivots[k]]);
      const std::size_t hi = std::min(n - 1, k + bw);
      for (std::size_t i = k + 1; i <= hi; ++i) x[i] -= at(i, k) * x[k];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      const std::size_t last_col = std::min(n - 1, ii + 2 * bw);
      double s = x[ii];
      for (std::size_t j = ii + 1; j <= last_col; ++j) s -= at(ii, j) * x[j];
      x[ii] = s / at(ii, ii);
    }
  }
};

}  // namespace

std::vector<double> solve_direct(const SparseSystem& system) {
  const CsrMatrix& a = system.matrix;
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("solve_direct: matrix must be square");
  if (system.rhs.size() != n) throw std::invalid_argument("solve_direct: rhs size mismatch");
  if (n == 0) return {};
  for (double v : a.values())
    if (!std::isfinite(v)) throw NonFiniteEntryError("solve_direct: matrix has a non-finite entry");
  for (double v : system.rhs)
    if (!std::isfinite(v)) throw NonFiniteEntryError("solve_direct: right-hand side has a non-finite entry");

  const std::vector<std::size_t> perm = reverse_cuthill_mckee(a);
  std::vector<std::size_t> pos(n);
  for (std::size_t k = 0; k < n; ++k) pos[perm[k]] = k;
  const std::size_t bw = bandwidth(a, perm);

  std::vector<double> row_scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      row_scale[pos[i]] = std::max(row_scale[pos[i]], std::abs(a.values()[k]));
  for (std::size_t i = 0; i < n; ++i)
    if (row_scale[i] == 0.0) throw SingularMatrixError(i, 0.0);

  // Factor once; the closure applies A^{-1} in the original ordering.
  std::function<void(std::vector<double>&)> apply_inverse;
  bool factored = false;
  std::vector<double> chol;
  if (system.symmetric) {
    chol.assign(n * (bw + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
        const std::size_t pi = pos[i], pj = pos[a.col_index()[k]];
        if (pj <= pi) chol[pi * (bw + 1) + (pj + bw - pi)] = a.values()[k];
      }
    if (banded_cholesky(chol, n, bw)) {
      factored = true;
      apply_inverse = [&](std::vector<double>& x) { cholesky_solve(chol, n, bw, x); };
    }
  }
  BandedLu lu;
  if (!factored) {
    lu.n = n;
    lu.bw = bw;
    lu.width = 3 * bw + 1;
    lu.band.assign(n * lu.width, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
        lu.at(pos[i], pos[a.col_index()[k]]) = a.values()[k];
    lu.factor(row_scale);
    apply_inverse = [&](std::vector<double>& x) { lu.solve(x); };
  }

  auto solve_permuted = [&](std::span<const double> rhs) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[pos[i]] = rhs[i];
    apply_inverse(y);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[pos[i]];
    return x;
  };

  std::vector<double> x = solve_permuted(system.rhs);
  double res = relative_residual(a, x, system.rhs);
  for (int it = 0; it < 3 && res > 1e-12; ++it) {
    std::vector<double> r = a.multiply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = system.rhs[i] - r[i];
    const std::vector<double> dx = solve_permuted(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
    const double next = relative_residual(a, x, system.rhs);
    if (!(next < res)) {
      for (std::size_t i = 0; i < n; ++i) x[i] -= dx[i];
      break;
    }
    res = next;
  }
  for (double v : x)
    if (!std::isfinite(v)) throw NonFiniteEntryError("solve_direct: solution is not finite");
  if (res > 1e-10) {
    std::ostringstream os;
    os << "solve_direct: relative residual " << res << " exceeds 1e-10";
    throw std::runtime_error(os.str());
  }
  return x;
}

}  // namespace sblfem::linalg
