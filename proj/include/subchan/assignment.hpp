#pragma once

#include <vector>

#include "subchan/channel.hpp"

namespace subchan {

enum class Orientation { kMinimize, kMaximize };

/// Rows are assignees, columns are items (rows <= cols). Forbidden cells are
/// tracked in a separate mask; their stored value is never used in arithmetic.
class CostMatrix {
 public:
  CostMatrix(Matrix values, Orientation orientation);

  void forbid(int row, int col);
  [[nodiscard]] bool is_forbidden(int row, int col) const { return forbidden_(row, col); }
  [[nodiscard]] bool any_forbidden() const { return forbidden_.any(); }

  [[nodiscard]] int rows() const { return static_cast<int>(values_.rows()); }
  [[nodiscard]] int cols() const { return static_cast<int>(values_.cols()); }
  [[nodiscard]] double operator()(int row, int col) const { return values_(row, col); }
  [[nodiscard]] const Matrix& values() const { return values_; }
  [[nodiscard]] const BoolMatrix& forbidden() const { return forbidden_; }
  [[nodiscard]] Orientation orientation() const { return orientation_; }

  /// Finite non-forbidden cells, rows <= cols, non-empty.
  void validate() const;

 private:
  Matrix values_;
  BoolMatrix forbidden_;
  Orientation orientation_;
};

struct AssignmentResult {
  std::vector<int> column_of_row;
  double objective_value = 0.0;  // sum of selected cells, accumulated in row order
};

/// Hungarian method (shortest augmenting path with dual potentials), O(R^2 C).
/// Throws InfeasibleError when a row is fully forbidden or every complete
/// assignment needs a forbidden cell.
[[nodiscard]] AssignmentResult solve_assignment(const CostMatrix& cost);

/// Exhaustive search over all injections rows -> cols. Test oracle; requires cols <= 10.
[[nodiscard]] AssignmentResult brute_force_assignment(const CostMatrix& cost);

/// Stacks `copies` consecutive replicas of every row: replica row r*copies + c
/// originates from row r.
[[nodiscard]] CostMatrix replicate_rows(const CostMatrix& cost, int copies);

/// Inverse of replicate_rows on a solution: sorted column set per original row.
[[nodiscard]] std::vector<std::vector<int>> merge_replicas(const AssignmentResult& result,
                                                           int copies);

}  // namespace subchan
