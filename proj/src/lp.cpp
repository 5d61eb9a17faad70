#include "absorbing/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absorbing/errors.hpp"

namespace absorbing {

PackingSolution solve_packing(const std::vector<double>& a, std::size_t rows, std::size_t cols) {
  // Tableau: rows constraint lines plus objective; columns y, slacks, rhs.
  const std::size_t width = cols + rows + 1;
  std::vector<double> t((rows + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) at(r, c) = a[r * cols + c];
    at(r, cols + r) = 1.0;
    at(r, width - 1) = 1.0;
    basis[r] = cols + r;
  }
  for (std::size_t c = 0; c < cols; ++c) at(rows, c) = -1.0;

  constexpr double kPivotTol = 1e-12;
  const std::size_t max_iter = 50 * (rows + cols) + 1000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > max_iter) throw Error(ErrorCode::SearchBudgetExceeded, "simplex iteration cap");
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (at(rows, c) < -kPivotTol) {
        enter = c;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = rows;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double coef = at(r, enter);
      if (coef <= kPivotTol) continue;
      const double ratio = at(r, width - 1) / coef;
      if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
        best = ratio;
        leave = r;
      }
    }
    if (leave == rows) throw Error(ErrorCode::InvalidArgument, "unbounded packing program");
    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
  }
  PackingSolution sol;
  sol.primal.assign(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] < cols) sol.primal[basis[r]] = std::max(0.0, at(r, width - 1));
  }
  sol.dual.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) sol.dual[r] = std::max(0.0, at(rows, cols + r));
  sol.objective = at(rows, width - 1);
  return sol;
}

namespace {

void clean_mixture(std::vector<double>& x) {
  double sum = 0.0;
  for (double& v : x) {
    if (v < 1e-12) v = 0.0;
    sum += v;
  }
  for (double& v : x) v /= sum;
}

}  // namespace

MatrixGameSolution solve_matrix_game(const std::vector<double>& m, std::size_t rows,
                                     std::size_t cols) {
  const double lo = *std::min_element(m.begin(), m.end());
  const double shift = 1.0 - lo;
  std::vector<double> a(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) a[k] = m[k] + shift;
  const PackingSolution p = solve_packing(a, rows, cols);
  MatrixGameSolution s;
  double sy = 0.0, su = 0.0;
  for (double y : p.primal) sy += y;
  for (double u : p.dual) su += u;
  s.col.resize(cols);
  s.row.resize(rows);
  for (std::size_t c = 0; c < cols; ++c) s.col[c] = p.primal[c] / sy;
  for (std::size_t r = 0; r < rows; ++r) s.row[r] = su > 0 ? p.dual[r] / su : 1.0 / rows;
  // Pivoting leaves roundoff-sized weights that would change supports.
  clean_mixture(s.col);
  clean_mixture(s.row);
  // Evaluate the value at the returned mixture rather than trusting 1/sy.
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    double v = 0.0;
    for (std::size_t c = 0; c < cols; ++c) v += m[r * cols + c] * s.col[c];
    worst = std::max(worst, v);
  }
  s.value = worst;
  return s;
}

double ratio_value(const std::vector<double>& n, const std::vector<double>& d, std::size_t rows,
                   std::size_t cols, const std::vector<double>& x) {
  double best = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      num += n[r * cols + c] * x[c];
      den += d[r * cols + c] * x[c];
    }
    if (den > 0.0) best = std::max(best, num / den);
  }
  return best;
}

RatioMinmax minimize_ratio(const std::vector<double>& n, const std::vector<double>& d,
                           std::size_t rows, std::size_t cols, double tol) {
  constexpr double kFeasTol = 1e-13;
  std::vector<double> m(rows * cols);
  RatioMinmax res;
  res.value = std::numeric_limits<double>::infinity();
  // Degenerate vertices come back with roundoff weights on columns the exact
  // optimum leaves out; those weights can switch on extra absorbing rows.
  auto consider = [&](const std::vector<double>& x) {
    for (double cut : {0.0, 1e-9, 1e-6}) {
      std::vector<double> y = x;
      double sum = 0.0;
      for (double& v : y) sum += (v = v > cut ? v : 0.0);
      if (!(sum > 0.0)) continue;
      for (double& v : y) v /= sum;
      const double val = ratio_value(n, d, rows, cols, y);
      if (val < res.value) {
        res.value = val;
        res.col = std::move(y);
      }
    }
  };
  auto feasible = [&](double v) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = n[k] - v * d[k];
    const MatrixGameSolution s = solve_matrix_game(m, rows, cols);
    if (s.value > kFeasTol) return false;
    consider(s.col);
    return true;
  };
  // Columns where every row is nonabsorbing leave no absorbing reply.
  for (std::size_t c = 0; c < cols; ++c) {
    bool zero = true;
    for (std::size_t r = 0; r < rows && zero; ++r) zero = d[r * cols + c] == 0.0;
    if (zero) {
      res.col.assign(cols, 0.0);
      res.col[c] = 1.0;
      res.value = 0.0;
      res.lower = 0.0;
      return res;
    }
  }
  double lo = 0.0, hi = 1.0;
  feasible(hi);  // N <= D makes v = 1 feasible
  if (res.col.empty()) res.col.assign(cols, 1.0 / static_cast<double>(cols));
  res.value = std::min(res.value, ratio_value(n, d, rows, cols, res.col));
  while (hi - lo > tol * 1e-3 && res.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    ++res.iterations;
    if (feasible(mid)) hi = mid;
    else lo = mid;
  }
  res.lower = lo;
  return res;
}

}  // namespace absorbing
