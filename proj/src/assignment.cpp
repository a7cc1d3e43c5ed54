#include "subchan/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "subchan/errors.hpp"

namespace subchan {

namespace {

constexpr int kBruteForceMaxCols = 10;

double selected_sum(const CostMatrix& cost, const std::vector<int>& column_of_row) {
  double total = 0.0;
  for (int r = 0; r < cost.rows(); ++r) total += cost(r, column_of_row[r]);
  return total;
}

void require_rows_usable(const CostMatrix& cost) {
  for (int r = 0; r < cost.rows(); ++r) {
    if (cost.forbidden().row(r).all()) {
      throw InfeasibleError("assignment infeasible: row " + std::to_string(r) +
                            " has every cell forbidden");
    }
  }
}

// Minimisation view of the cost: maximisation is negated, forbidden cells get
// a finite sentinel that exceeds the cost of any all-allowed assignment.
Matrix minimization_matrix(const CostMatrix& cost) {
  Matrix work = cost.orientation() == Orientation::kMaximize ? Matrix(-cost.values())
                                                              : cost.values();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = 0; r < cost.rows(); ++r) {
    for (int c = 0; c < cost.cols(); ++c) {
      if (cost.is_forbidden(r, c)) continue;
      lo = std::min(lo, work(r, c));
      hi = std::max(hi, work(r, c));
    }
  }
  if (cost.any_forbidden()) {
    const double span = hi - lo;
    const double sentinel = hi + (span + 1.0) * static_cast<double>(cost.cols());
    for (int r = 0; r < cost.rows(); ++r) {
      for (int c = 0; c < cost.cols(); ++c) {
        if (cost.is_forbidden(r, c)) work(r, c) = sentinel;
      }
    }
  }
  return work;
}

}  // namespace

CostMatrix::CostMatrix(Matrix values, Orientation orientation)
    : values_(std::move(values)),
      forbidden_(BoolMatrix::Constant(values_.rows(), values_.cols(), false)),
      orientation_(orientation) {}

void CostMatrix::forbid(int row, int col) {
  if (row < 0 || row >= rows() || col < 0 || col >= cols()) {
    throw ValidationError("forbid: cell out of range");
  }
  forbidden_(row, col) = true;
}

void CostMatrix::validate() const {
  if (rows() == 0 || cols() == 0) throw ValidationError("cost matrix is empty");
  if (rows() > cols()) {
    throw ValidationError("cost matrix has more rows (" + std::to_string(rows()) +
                          ") than columns (" + std::to_string(cols()) + ")");
  }
  for (int r = 0; r < rows(); ++r) {
    for (int c = 0; c < cols(); ++c) {
      if (!forbidden_(r, c) && !std::isfinite(values_(r, c))) {
        throw ValidationError("cost cell (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") is not finite");
      }
    }
  }
}

AssignmentResult solve_assignment(const CostMatrix& cost) {
  cost.validate();
  require_rows_usable(cost);

  const Matrix work = minimization_matrix(cost);
  const int n = cost.rows();
  const int m = cost.cols();
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based; column 0 is the virtual root of each augmenting search.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> row_of_col(m + 1, 0), way(m + 1, 0);
  std::vector<double> min_slack(m + 1);
  std::vector<char> used(m + 1);

  for (int i = 1; i <= n; ++i) {
    row_of_col[0] = i;
    int col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const int row0 = row_of_col[col0];
      double delta = inf;
      int col1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double slack = work(row0 - 1, j - 1) - u[row0] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          way[j] = col0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          col1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of_col[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col0 = col1;
    } while (row_of_col[col0] != 0);
    do {
      const int col1 = way[col0];
      row_of_col[col0] = row_of_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  AssignmentResult result;
  result.column_of_row.assign(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (row_of_col[j] != 0) result.column_of_row[row_of_col[j] - 1] = j - 1;
  }
  for (int r = 0; r < n; ++r) {
    if (cost.is_forbidden(r, result.column_of_row[r])) {
      throw InfeasibleError("assignment infeasible: no complete assignment avoids forbidden "
                            "cells (row " + std::to_string(r) + " cannot be placed)");
    }
  }
  result.objective_value = selected_sum(cost, result.column_of_row);
  return result;
}

AssignmentResult brute_force_assignment(const CostMatrix& cost) {
  cost.validate();
  if (cost.cols() > kBruteForceMaxCols) {
    throw GuardExceededError("brute_force_assignment: " + std::to_string(cost.cols()) +
                             " columns exceeds the oracle limit of " +
                             std::to_string(kBruteForceMaxCols));
  }
  require_rows_usable(cost);

  const int n = cost.rows();
  const int m = cost.cols();
  const bool maximize = cost.orientation() == Orientation::kMaximize;
  std::vector<int> current(static_cast<std::size_t>(n), -1);
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  AssignmentResult best;
  bool found = false;

  auto search = [&](auto&& self, int row, double partial) -> void {
    if (row == n) {
      if (!found || (maximize ? partial > best.objective_value
                              : partial < best.objective_value)) {
        best.column_of_row = current;
        best.objective_value = partial;
        found = true;
      }
      return;
    }
    for (int c = 0; c < m; ++c) {
      if (taken[c] || cost.is_forbidden(row, c)) continue;
      taken[c] = 1;
      current[row] = c;
      self(self, row + 1, partial + cost(row, c));
      taken[c] = 0;
    }
  };
  search(search, 0, 0.0);

  if (!found) {
    throw InfeasibleError("assignment infeasible: no complete assignment avoids forbidden cells");
  }
  return best;
}

CostMatrix replicate_rows(const CostMatrix& cost, int copies) {
  if (copies < 1) throw ValidationError("copies must be >= 1");
  if (static_cast<long long>(cost.rows()) * copies > cost.cols()) {
    throw InfeasibleError("quota infeasible: " + std::to_string(cost.rows()) + " rows x " +
                          std::to_string(copies) + " copies exceeds " +
                          std::to_string(cost.cols()) + " columns");
  }
  if (copies == 1) return cost;
  Matrix values(cost.rows() * copies, cost.cols());
  for (int r = 0; r < cost.rows(); ++r) {
    for (int c = 0; c < copies; ++c) values.row(r * copies + c) = cost.values().row(r);
  }
  CostMatrix out(std::move(values), cost.orientation());
  for (int r = 0; r < cost.rows(); ++r) {
    for (int col = 0; col < cost.cols(); ++col) {
      if (!cost.is_forbidden(r, col)) continue;
      for (int c = 0; c < copies; ++c) out.forbid(r * copies + c, col);
    }
  }
  return out;
}

std::vector<std::vector<int>> merge_replicas(const AssignmentResult& result, int copies) {
  if (copies < 1) throw ValidationError("copies must be >= 1");
  const std::size_t rows = result.column_of_row.size() / static_cast<std::size_t>(copies);
  std::vector<std::vector<int>> merged(rows);
  for (std::size_t r = 0; r < result.column_of_row.size(); ++r) {
    merged[r / static_cast<std::size_t>(copies)].push_back(result.column_of_row[r]);
  }
  for (auto& cols : merged) std::sort(cols.begin(), cols.end());
  return merged;
}

}  // namespace subchan
