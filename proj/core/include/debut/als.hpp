#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "debut/chain.hpp"
#include "debut/dense.hpp"
#include "debut/factor.hpp"

namespace debut {

enum class Side { left, right };

/// Product of the factors on one side of factor idx (0 = rightmost):
/// left  -> factors idx+1 .. N-1 (identity of size p_idx when idx is the leftmost),
/// right -> factors 0 .. idx-1   (identity of size q_idx when idx == 0).
/// Throws IndexError for idx >= N.
DenseMatrix lump_side(const DebutChain& c, std::size_t idx, Side side);

struct FactorSolution {
  std::vector<double> values;  // flat [D, r, s, t] order
  double residual = 0.0;       // ||F - L M R||_F at the solution
};

/// Least-squares values of a factor M with the given pattern minimizing
/// ||F - L M R||_F. Solved through the normal equations
///   G[(a,b),(a',b')] = (L^T L)[a,a'] (R R^T)[b,b'],   rhs[(a,b)] = (L^T F R^T)[a,b]
/// split into the connected components of G's coupling graph. A component whose
/// Cholesky factorization fails is retried with `ridge` (at least 1e-8, scaled by the
/// mean diagonal) on its diagonal; SingularSystem if that fails too.
FactorSolution solve_factor_ls(const DenseMatrix& f, const DenseMatrix& l, const DenseMatrix& r,
                               const FactorShape& shape, double ridge = 0.0);

/// The coupling components solve_factor_ls would use for factor idx of c, each a
/// list of flat value indices, ordered by their smallest index.
std::vector<std::vector<std::size_t>> coupling_components(const DebutChain& c, std::size_t idx);

struct AlsOptions {
  /// Defaults to 5 when F has at most 2^17 entries, 10 otherwise.
  std::optional<int> max_sweeps;
  /// Stop once a sweep lowers the relative error by less than this.
  double rel_tol = 1e-4;
  double ridge = 0.0;
  std::uint64_t seed = 0;

  static int default_sweeps(std::size_t target_entries) noexcept { return target_entries <= (1u << 17) ? 5 : 10; }
};

struct AlsResult {
  DebutChain chain;
  double initial_error = 0.0;
  /// Relative error after each half-sweep (two entries per sweep).
  std::vector<double> error_history;
  int sweeps_run = 0;
  bool converged = false;
  std::vector<std::string> warnings;

  double final_error() const { return error_history.empty() ? initial_error : error_history.back(); }
};

/// Fits the chain to F by alternating least squares, starting from a seeded gaussian
/// chain (sigma = 1/sqrt(max s_i)). Each sweep solves factors rightmost to leftmost,
/// then leftmost to rightmost. Throws DimensionError when the chain is not
/// F.rows() x F.cols(); densification / full-density failures are only warnings.
AlsResult als_fit(const DenseMatrix& f, const ChainSpec& spec, const AlsOptions& opts = {});

/// ||F - materialize(c)||_F / ||F||_F; 0 when both norms vanish, +inf when only F does.
double relative_error(const DenseMatrix& f, const DebutChain& c);
double relative_error(const DenseMatrix& f, const DenseMatrix& approx);

}  // namespace debut
