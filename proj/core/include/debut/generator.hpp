#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "debut/chain.hpp"

namespace debut {

enum class ChainStyle { monotonic, bulging };

ChainStyle parse_style(std::string_view name);
std::string_view to_string(ChainStyle style);

struct GeneratorOptions {
  std::size_t max_factors = 6;
  /// Bulging chains peak at no more than this times max(rows_out, cols_in).
  double max_bulge_ratio = 2.0;
  std::size_t max_candidates = 10;
};

/// Heuristic chain synthesis. rows_out and cols_in are each split into an ordered
/// sequence: the odd part times some power of two as one factor, the remaining
/// power of two spread as evenly as possible over the other factors. Every
/// ordering of an r-sequence is paired with every ordering of an s-sequence of
/// the same length; the intermediate dims follow, and t_i = r_0 ... r_{i-1}.
///
/// Candidates fully pass validate() and match the style:
///   monotonic: cols_in, p_0, ..., p_{N-1} is monotone;
///   bulging:   that sequence rises to a single interior maximum above both ends.
/// Sorted by total nonzeros, then factor count, then r and s sequences.
/// Deterministic. Throws NoChainFound when nothing qualifies.
std::vector<ChainSpec> generate_chains(std::size_t rows_out, std::size_t cols_in, ChainStyle style,
                                       const GeneratorOptions& opts = {});

}  // namespace debut
