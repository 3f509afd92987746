#pragma once

#include <Eigen/Core>
#include <vector>

namespace mixw2 {

struct AssignmentResult {
  double cost = 0.0;
  std::vector<int> row_to_col;  // row i matched to column row_to_col[i]
  std::vector<double> u, v;     // dual potentials (reduced costs >= 0)
};

/// Minimum-cost perfect matching on a square cost matrix, O(n^3) shortest
/// augmenting paths with dual potentials.
AssignmentResult solve_assignment(const Eigen::MatrixXd& cost);

/// Same optimum, but among all optimal assignments returns the
/// lexicographically smallest permutation (row 0 gets the smallest feasible
/// column, then row 1, ...). Uses complementary slackness: every optimal
/// assignment lives on the tight edges of the dual from solve_assignment.
AssignmentResult solve_assignment_lex(const Eigen::MatrixXd& cost);

}  // namespace mixw2
