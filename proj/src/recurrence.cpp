#include <algorithm>

#include "ttkit/track.hpp"

namespace ttkit {

namespace {

// Phase-1 simplex with exact rationals and Bland's rule. Decides
// feasibility of {Ax = b, x >= 0} and fills `solution` when feasible.
bool feasible(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
              std::vector<Rational>& solution) {
  size_t m = A.size();
  size_t n = m ? A[0].size() : 0;
  for (size_t i = 0; i < m; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (auto& v : A[i]) v = -v;
    }
  }
  // Tableau over n structural + m artificial columns.
  size_t cols = n + m;
  std::vector<std::vector<Rational>> T(m, std::vector<Rational>(cols + 1));
  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1;
    T[i][cols] = b[i];
    basis[i] = n + i;
  }
  // Objective row: minimize sum of artificials; reduced costs.
  std::vector<Rational> z(cols + 1);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j <= cols; ++j)
      if (j < n || j == cols) z[j] -= T[i][j];

  for (;;) {
    size_t enter = cols;
    for (size_t j = 0; j < cols; ++j) {
      if (z[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    size_t leave = m;
    Rational best;
    for (size_t i = 0; i < m; ++i) {
      if (T[i][enter] <= 0) continue;
      Rational ratio = T[i][cols] / T[i][enter];
      if (leave == m || ratio < best ||
          (ratio == best && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) return false;  // unbounded: cannot happen in phase 1
    Rational piv = T[leave][enter];
    for (auto& v : T[leave]) v /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == leave || T[i][enter] == 0) continue;
      Rational f = T[i][enter];
      for (size_t j = 0; j <= cols; ++j) T[i][j] -= f * T[leave][j];
    }
    Rational f = z[enter];
    if (f != 0)
      for (size_t j = 0; j <= cols; ++j) z[j] -= f * T[leave][j];
    basis[leave] = enter;
  }
  if (z[cols] != 0) return false;  // residual artificial value
  solution.assign(n, Rational(0));
  for (size_t i = 0; i < m; ++i)
    if (basis[i] < n) solution[basis[i]] = T[i][cols];
  return true;
}

}  // namespace

std::optional<TransverseMeasure> is_recurrent(const TrainTrack& track) {
  std::vector<int> branches = track.branch_ids();
  std::map<int, size_t> col;
  for (size_t j = 0; j < branches.size(); ++j) col[branches[j]] = j;

  // Switch conditions A w = 0 with w = 1 + x, x >= 0: solve A x = -A 1.
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (const auto& sw : track.switches) {
    std::vector<Rational> row(branches.size());
    row[col[sw.large.branch]] += 1;
    row[col[sw.small_left.branch]] -= 1;
    row[col[sw.small_right.branch]] -= 1;
    Rational rhs = 0;
    for (const auto& v : row) rhs -= v;
    A.push_back(std::move(row));
    b.push_back(rhs);
  }
  std::vector<Rational> x;
  if (!feasible(std::move(A), std::move(b), x)) return std::nullopt;

  TransverseMeasure mu;
  Rational min_w;
  bool first = true;
  for (size_t j = 0; j < branches.size(); ++j) {
    Rational w = 1 + x[j];
    mu.weights[branches[j]] = w;
    if (first || w < min_w) min_w = w;
    first = false;
  }
  for (auto& [id, w] : mu.weights) w /= min_w;
  return mu;
}

}  // namespace ttkit
