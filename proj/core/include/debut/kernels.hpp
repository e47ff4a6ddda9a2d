#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "debut/chain.hpp"
#include "debut/dense.hpp"
#include "debut/factor.hpp"

namespace debut {

/// Counts multiply-accumulates actually executed by the instrumented kernels.
struct MacCounter {
  std::uint64_t macs = 0;
};

/// Columns processed together by the sparse kernels. No effect on results.
inline constexpr std::size_t kColumnBlock = 64;

/// Y = M X for the factor M (p x q) and X (q x n), in exactly p*s MACs per column.
/// Each output entry sums its s terms in ascending grid-column order.
DenseMatrix factor_apply(const DebutFactor& f, const DenseMatrix& x, MacCounter* counter = nullptr);

/// Y = M^T X for X (p x n), p*s MACs per column.
DenseMatrix factor_apply_transposed(const DebutFactor& f, const DenseMatrix& x,
                                    MacCounter* counter = nullptr);

struct ApplyOptions {
  /// Worker threads; columns are partitioned, so results do not depend on this.
  unsigned threads = 1;
  MacCounter* counter = nullptr;
};

/// Applies the factors rightmost first. X must have cols_in rows.
DenseMatrix chain_apply(const DebutChain& c, const DenseMatrix& x, const ApplyOptions& opts = {});

/// Applies the transposed chain (leftmost factor's transpose first). X has rows_out rows.
DenseMatrix chain_apply_transposed(const DebutChain& c, const DenseMatrix& x);

/// Dense p x q matrix of one factor.
DenseMatrix materialize(const DebutFactor& f);

/// Explicit rows_out x cols_in product of the chain.
DenseMatrix materialize(const DebutChain& c);

/// Product of a contiguous run of factors (run[0] rightmost). The run must be non-empty
/// and adjacent.
DenseMatrix materialize_product(std::span<const DebutFactor> run);

/// Plain dense product A B.
DenseMatrix dense_multiply(const DenseMatrix& a, const DenseMatrix& b, MacCounter* counter = nullptr);

struct BipolarReport {
  bool pass = false;
  std::size_t zero_entries = 0;
  std::size_t non_bipolar_entries = 0;  // nonzero entries with | |x| - 1 | > tolerance
  std::size_t total_entries = 0;

  friend bool operator==(const BipolarReport&, const BipolarReport&) = default;
};

inline constexpr double kBipolarTolerance = 1e-12;

/// Classifies every entry of m as zero, +-1, or other.
BipolarReport bipolar_check(const DenseMatrix& m);

/// Binds random +-1 values (seeded) to every factor, materializes the product and
/// checks that every entry is +-1. Densification is not required.
BipolarReport bipolar_test(const ChainSpec& spec, std::uint64_t seed);

/// Text grid with '+' for +1, '-' for -1, '.' for 0 and '*' for anything else.
std::string sign_grid(const DenseMatrix& m);

}  // namespace debut
