#include "mixw2/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixw2 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Augmenting-path feasibility for the lexicographic refinement: try to match
// every free row using only allowed edges.
bool try_kuhn(int row, const std::vector<std::vector<int>>& adj,
              std::vector<char>& visited, std::vector<int>& col_to_row) {
  for (int col : adj[row]) {
    if (visited[col]) continue;
    visited[col] = 1;
    if (col_to_row[col] < 0 || try_kuhn(col_to_row[col], adj, visited, col_to_row)) {
      col_to_row[col] = row;
      return true;
    }
  }
  return false;
}

bool perfect_matching_exists(int n, const std::vector<std::vector<int>>& adj,
                             const std::vector<int>& fixed_row_to_col) {
  std::vector<int> col_to_row(n, -1);
  for (int i = 0; i < n; ++i)
    if (fixed_row_to_col[i] >= 0) col_to_row[fixed_row_to_col[i]] = i;
  for (int i = 0; i < n; ++i) {
    if (fixed_row_to_col[i] >= 0) continue;
    std::vector<char> visited(n, 0);
    for (int j = 0; j < n; ++j)
      if (fixed_row_to_col[j] >= 0) visited[fixed_row_to_col[j]] = 1;
    if (!try_kuhn(i, adj, visited, col_to_row)) return false;
  }
  return true;
}

}  // namespace

AssignmentResult solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (n == 0) throw std::invalid_argument("solve_assignment: empty cost matrix");
  if (cost.cols() != n)
    throw std::invalid_argument("solve_assignment: cost matrix must be square");
  if (!cost.allFinite())
    throw std::invalid_argument("solve_assignment: nonfinite cost entries");

  // 1-indexed Jonker-Volgenant style scheme; index 0 is the virtual column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  AssignmentResult out;
  out.row_to_col.assign(n, -1);
  out.u.assign(n, 0.0);
  out.v.assign(n, 0.0);
  for (int j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
  for (int i = 1; i <= n; ++i) out.u[i - 1] = u[i];
  for (int j = 1; j <= n; ++j) out.v[j - 1] = v[j];
  out.cost = 0.0;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.row_to_col[i]);
  return out;
}

AssignmentResult solve_assignment_lex(const Eigen::MatrixXd& cost) {
  AssignmentResult base = solve_assignment(cost);
  const int n = static_cast<int>(cost.rows());
  if (n == 1) return base;

  const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;

  // Tight-edge graph: by complementary slackness every optimal assignment
  // uses only edges with zero reduced cost.
  std::vector<std::vector<int>> tight(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (cost(i, j) - base.u[i] - base.v[j] <= tol) tight[i].push_back(j);

  // Greedy per row: smallest tight column that still extends to a perfect
  // matching. The base matching guarantees at least one candidate per row.
  std::vector<int> fixed(n, -1);
  std::vector<char> col_taken(n, 0);
  for (int i = 0; i < n; ++i) {
    bool placed = false;
    for (int j : tight[i]) {
      if (col_taken[j]) continue;
      fixed[i] = j;
      if (perfect_matching_exists(n, tight, fixed)) {
        col_taken[j] = 1;
        placed = true;
        break;
      }
      fixed[i] = -1;
    }
    if (!placed) {
      // numerically degenerate tight graph; fall back to the base solution
      return base;
    }
  }

  AssignmentResult out;
  out.row_to_col = fixed;
  out.u = base.u;
  out.v = base.v;
  out.cost = 0.0;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.row_to_col[i]);
  return out;
}

}  // namespace mixw2
