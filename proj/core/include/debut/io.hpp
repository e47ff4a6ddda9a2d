#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "debut/chain.hpp"
#include "debut/convolution.hpp"
#include "debut/dense.hpp"
#include "debut/factor.hpp"

namespace debut {

// Binary files are little-endian and store values as 32-bit floats; values are
// rounded on write. Readers throw FormatError on a bad magic, truncation,
// inconsistent dims or trailing bytes.

/// "DBF1", u32 p q r s t, p*s floats in flat [d, i, j, k] order.
void write_factor(std::ostream& os, const DebutFactor& f);
DebutFactor read_factor(std::istream& is);

/// "DBMT", u32 rows cols, row-major floats.
void write_matrix(std::ostream& os, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& is);

/// "DBT3", u32 channels height width, channel-major floats.
void write_tensor(std::ostream& os, const Tensor3& x);
Tensor3 read_tensor(std::istream& is);

/// Headerless comma-separated rows, written with round-trip precision.
void write_matrix_csv(std::ostream& os, const DenseMatrix& m);
DenseMatrix read_matrix_csv(std::istream& is);

/// Path helpers (FormatError when a file cannot be opened).
std::string read_text_file(const std::filesystem::path& path);
void write_factor_file(const std::filesystem::path& path, const DebutFactor& f);
DebutFactor read_factor_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix read_matrix_file(const std::filesystem::path& path);
/// DBMT when the file starts with the magic, CSV otherwise.
DenseMatrix read_matrix_any(const std::filesystem::path& path);
void write_matrix_csv_file(const std::filesystem::path& path, const DenseMatrix& m);
void write_tensor_file(const std::filesystem::path& path, const Tensor3& x);
Tensor3 read_tensor_file(const std::filesystem::path& path);

ChainSpec read_chain_file(const std::filesystem::path& path);
ModelManifest read_manifest_file(const std::filesystem::path& path);

/// factor_<i>.dbf for every factor (0 = rightmost) plus chain.txt; creates dir.
void write_chain_dir(const std::filesystem::path& dir, const DebutChain& c);
/// Reads factor_0.dbf, factor_1.dbf, ... until the first missing index.
DebutChain read_chain_dir(const std::filesystem::path& dir);

/// `step,relative_error` rows, step 0 being the initial error.
void write_error_history(const std::filesystem::path& path, double initial, const std::vector<double>& history);

}  // namespace debut
