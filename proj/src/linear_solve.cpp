#include "mpvi/linear_solve.hpp"

#include <algorithm>
#include <map>

namespace mpvi {

namespace {

void check_shape(const SparseSystem& system) {
  if (system.rhs.size() != system.rows.size()) throw std::invalid_argument("right-hand side size mismatch");
  for (const auto& row : system.rows) {
    for (const auto& [column, value] : row) {
      if (column >= system.rows.size()) throw std::invalid_argument("column index out of range");
    }
  }
}

}  // namespace

std::vector<Rational> solve_dense(const SparseSystem& system) {
  check_shape(system);
  const std::size_t n = system.size();
  // Augmented integer matrix, column n holds the right-hand side.
  std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class lcm = system.rhs[i].get_den();
    for (const auto& [column, value] : system.rows[i]) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), value.get_den_mpz_t());
    for (const auto& [column, value] : system.rows[i]) m[i][column] += lcm / value.get_den() * value.get_num();
    m[i][n] = lcm / system.rhs[i].get_den() * system.rhs[i].get_num();
  }

  mpz_class previous = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m[pivot][k] == 0) ++pivot;
    if (pivot == n) throw SingularSystemError("singular linear system");
    if (pivot != k) std::swap(m[pivot], m[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]);
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), previous.get_mpz_t());
      }
      m[i][k] = 0;
    }
    previous = m[k][k];
  }

  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc(m[i][n]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m[i][j] != 0) acc -= Rational(m[i][j]) * x[j];
    }
    x[i] = acc / Rational(m[i][i]);
  }
  return x;
}

std::vector<Rational> solve_sparse(const SparseSystem& system) {
  check_shape(system);
  const std::size_t n = system.size();
  std::vector<std::map<std::uint32_t, Rational>> rows(n);
  std::vector<Rational> rhs = system.rhs;
  // rows_with[c]: rows that may hold column c; stale entries are skipped.
  std::vector<std::vector<std::uint32_t>> rows_with(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& [column, value] : system.rows[i]) {
      if (value == 0) continue;
      rows[i][column] += value;
      rows_with[column].push_back(i);
    }
  }

  std::vector<char> used(n, 0);
  std::vector<std::uint32_t> pivot_row(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    auto& candidates = rows_with[c];
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    std::vector<std::uint32_t> live;
    for (std::uint32_t r : candidates) {
      if (!used[r] && rows[r].count(c)) live.push_back(r);
    }
    if (live.empty()) throw SingularSystemError("singular linear system");
    const std::uint32_t p = *std::min_element(live.begin(), live.end(), [&](std::uint32_t a, std::uint32_t b) {
      return rows[a].size() < rows[b].size();
    });
    used[p] = 1;
    pivot_row[c] = p;
    const Rational pivot = rows[p].at(c);
    for (std::uint32_t r : live) {
      if (r == p) continue;
      const Rational factor = rows[r].at(c) / pivot;
      for (const auto& [column, value] : rows[p]) {
        auto [it, inserted] = rows[r].try_emplace(column, 0);
        it->second -= factor * value;
        if (it->second == 0) {
          rows[r].erase(it);
        } else if (inserted) {
          rows_with[column].push_back(r);
        }
      }
      rows[r].erase(c);
      rhs[r] -= factor * rhs[p];
    }
    candidates.clear();
  }

  // Pivot rows are upper triangular in column order.
  std::vector<Rational> x(n);
  for (std::uint32_t c = n; c-- > 0;) {
    const auto& row = rows[pivot_row[c]];
    Rational acc = rhs[pivot_row[c]];
    for (const auto& [column, value] : row) {
      if (column != c) acc -= value * x[column];
    }
    x[c] = acc / row.at(c);
  }
  return x;
}

std::vector<Rational> solve_linear(const SparseSystem& system) {
  return system.size() <= kDenseSolveLimit ? solve_dense(system) : solve_sparse(system);
}

}  // namespace mpvi
