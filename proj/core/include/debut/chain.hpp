#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "debut/conv_shape.hpp"
#include "debut/factor.hpp"

namespace debut {

/// Ordered factor shapes. factors[0] is the rightmost factor (applied first to the
/// input), factors.back() the leftmost. A plain value: adjacency is checked by
/// parse_chain / check_adjacency / DebutChain, and reported by validate().
struct ChainSpec {
  std::vector<FactorShape> factors;

  std::size_t size() const noexcept { return factors.size(); }
  bool empty() const noexcept { return factors.empty(); }
  /// p of the leftmost factor.
  std::size_t rows_out() const { return factors.back().p; }
  /// q of the rightmost factor.
  std::size_t cols_in() const { return factors.front().q; }
  std::size_t total_nonzeros() const;

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// Throws ShapeError on an invalid factor, AdjacencyError on an empty chain or on the
/// first junction with q_i != p_{i-1}.
void check_adjacency(const ChainSpec& spec);

/// Parses either the arrow form `16 <-(2,2,8)- 16 <-(2,2,4)- 16` (leftmost factor
/// first) or the line form (one `p q r s t` per line, leftmost factor first).
/// Blank lines and `#` comments are ignored; in arrow form only the first remaining
/// line is read. Does not check adjacency.
ChainSpec parse_chain_unchecked(std::string_view text);

/// parse_chain_unchecked followed by check_adjacency.
ChainSpec parse_chain(std::string_view text);

/// Canonical arrow form, e.g. `16 <-(2,2,8)- 16 <-(2,2,4)- 16`.
std::string format_chain(const ChainSpec& spec);

struct ValidationReport {
  std::vector<bool> shapes_ok;          // per factor
  std::vector<bool> adjacency_ok;       // per junction i (between factor i and i+1)
  std::vector<bool> densification_ok;   // per factor: t_0 == 1, t_i == prod_{j<i} r_j
  bool full_density_ok = false;         // prod r == rows_out and prod s == cols_in
  std::vector<std::string> messages;

  bool shapes_pass() const;
  bool adjacency_pass() const;
  bool densification_pass() const;
  /// Valid for substitution: every group passes.
  bool valid() const { return shapes_pass() && adjacency_pass() && densification_pass() && full_density_ok; }
};

/// Never throws; every failing junction is listed in messages.
ValidationReport validate(const ChainSpec& spec);

/// Shape of the product of factors 0..i under densification: a rows x cols matrix of
/// dense block_rows x block_cols blocks on its diagonal.
struct PartialProductShape {
  std::size_t rows;
  std::size_t cols;
  std::size_t block_rows;
  std::size_t block_cols;
  std::size_t t = 1;

  friend bool operator==(const PartialProductShape&, const PartialProductShape&) = default;
};

/// Throws DensificationError when the chain does not densify.
std::vector<PartialProductShape> partial_products(const ChainSpec& spec);

/// 1 - (sum p_i s_i) / (rows_out * cols_in). Weights only; biases excluded.
double layer_compression(const ChainSpec& spec);

struct LayerEntry {
  std::string name;
  std::size_t c_in = 0;
  std::size_t c_out = 0;
  std::size_t k = 1;
  std::size_t bias_count = 0;
  std::size_t extra_params = 0;  // e.g. batch-norm parameters owned by the layer

  std::size_t weight_params() const noexcept { return c_out * k * k * c_in; }
};

struct ModelManifest {
  std::vector<LayerEntry> layers;
  std::size_t model_extra = 0;

  std::size_t total_params() const;
  const LayerEntry* find(std::string_view name) const;
};

/// Text form: one `name c_i c_o k bias_count extra_params` per line, optionally a
/// `model_extra <count>` line, `#` comments.
ModelManifest parse_manifest(std::string_view text);

struct ModelCompression {
  double ratio = 0.0;                 // saved / total
  std::int64_t remaining_params = 0;  // total - saved
  std::int64_t saved_params = 0;      // negative if a chain outgrows its layer
  std::int64_t total_params = 0;
};

/// Replaced layers lose (weight_params - chain nonzeros); biases and extra parameters
/// stay. Throws UnknownLayer or ShapeMismatch (chain dims != [c_o, k^2 c_i]).
ModelCompression model_compression(const ModelManifest& manifest,
                                   const std::map<std::string, ChainSpec>& replacements);

/// Multiply-accumulate counts for one chain application versus the dense GEMM.
struct CostEstimate {
  std::uint64_t debut_nonzeros_total = 0;
  std::uint64_t debut_macs_per_column = 0;
  std::uint64_t max_factor_nonzeros = 0;
  std::uint64_t gemm_macs_per_column = 0;
  std::uint64_t num_columns = 1;
  std::size_t num_factors = 0;

  std::uint64_t debut_macs_total() const noexcept { return debut_macs_per_column * num_columns; }
  std::uint64_t gemm_macs_total() const noexcept { return gemm_macs_per_column * num_columns; }
  double mac_ratio() const noexcept {
    return static_cast<double>(debut_macs_per_column) / static_cast<double>(gemm_macs_per_column);
  }
};

/// When conv is given, the chain must be c_o x k^2 c_i (ShapeMismatch otherwise) and
/// num_columns is H_o * W_o.
CostEstimate estimate_cost(const ChainSpec& spec, const std::optional<ConvShape>& conv = std::nullopt);

/// A ChainSpec with values bound to every factor.
class DebutChain {
 public:
  /// factors[0] is the rightmost factor. Throws AdjacencyError on mismatched dims.
  explicit DebutChain(std::vector<DebutFactor> factors);

  const ChainSpec& spec() const noexcept { return spec_; }
  std::size_t size() const noexcept { return factors_.size(); }
  std::size_t rows_out() const { return spec_.rows_out(); }
  std::size_t cols_in() const { return spec_.cols_in(); }
  const DebutFactor& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<DebutFactor>& factors() const noexcept { return factors_; }

  /// Replaces factor i; the shape must be unchanged.
  void set_factor(std::size_t i, DebutFactor f);

  friend bool operator==(const DebutChain&, const DebutChain&) = default;

 private:
  ChainSpec spec_;
  std::vector<DebutFactor> factors_;
};

/// Each factor i draws from the scheme with seed mix_seed(seed, i).
DebutChain random_chain(const ChainSpec& spec, const InitScheme& scheme, std::uint64_t seed);

}  // namespace debut
