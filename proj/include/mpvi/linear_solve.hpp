#pragma once

#include "mpvi/rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mpvi {

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square system A x = b with sparse rows: rows[i] holds (column, coefficient)
/// pairs with distinct columns.
struct SparseSystem {
  std::vector<std::vector<std::pair<std::uint32_t, Rational>>> rows;
  std::vector<Rational> rhs;

  std::size_t size() const { return rows.size(); }
};

/// Fraction-free (Bareiss) elimination. Each row is scaled to integers, the
/// elimination runs over mpz, and the triangular system is back-substituted
/// in rationals. Throws SingularSystemError.
std::vector<Rational> solve_dense(const SparseSystem& system);

/// Rational Gaussian elimination on sparse rows, taking columns in order and
/// the pivot row with the fewest entries. Suited to large systems with little
/// fill. Throws SingularSystemError.
std::vector<Rational> solve_sparse(const SparseSystem& system);

/// Up to this many unknowns solve_linear uses the dense solver.
inline constexpr std::size_t kDenseSolveLimit = 64;

std::vector<Rational> solve_linear(const SparseSystem& system);

}  // namespace mpvi
