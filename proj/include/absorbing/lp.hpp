#pragma once

// Small dense linear programs for matrix games.

#include <cstddef>
#include <vector>

namespace absorbing {

struct PackingSolution {
  double objective = 0.0;
  std::vector<double> primal;  // y, one per column
  std::vector<double> dual;    // u, one per row
};

// max sum(y) s.t. A y <= 1, y >= 0, for A with strictly positive entries
// (row-major, rows x cols). Tableau simplex with Bland's rule.
PackingSolution solve_packing(const std::vector<double>& a, std::size_t rows, std::size_t cols);

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> col;  // minimizer's mixture over columns
  std::vector<double> row;  // maximizer's mixture over rows
};

// min over column mixtures x of max over rows of (M x)_row.
MatrixGameSolution solve_matrix_game(const std::vector<double>& m, std::size_t rows,
                                     std::size_t cols);

struct RatioMinmax {
  double value = 0.0;     // max(0, max_{a : (D x)_a > 0} (N x)_a / (D x)_a) at col
  std::vector<double> col;
  double lower = 0.0;     // certified lower bound on the infimum
  int iterations = 0;
};

// Minimizes over column mixtures x the best-reply value against x, where
// N = p * r and D = p are nonnegative, N <= D, and N > 0 exactly where D > 0.
// Bisection on v with an exact matrix-game feasibility test for
// (N - v D) x <= 0.
RatioMinmax minimize_ratio(const std::vector<double>& n, const std::vector<double>& d,
                           std::size_t rows, std::size_t cols, double tol);

// The objective of minimize_ratio at a given column mixture.
double ratio_value(const std::vector<double>& n, const std::vector<double>& d, std::size_t rows,
                   std::size_t cols, const std::vector<double>& x);

}  // namespace absorbing
