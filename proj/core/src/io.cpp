#include "debut/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "debut/error.hpp"

namespace debut {

namespace {

using Magic = std::array<char, 4>;
constexpr Magic kFactorMagic{'D', 'B', 'F', '1'};
constexpr Magic kMatrixMagic{'D', 'B', 'M', 'T'};
constexpr Magic kTensorMagic{'D', 'B', 'T', '3'};

void put_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

std::uint32_t narrow(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max())
    throw FormatError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

void put_values(std::ostream& os, std::span<const double> values) {
  for (const double v : values) put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

void put_magic(std::ostream& os, const Magic& m) { os.write(m.data(), 4); }

void check_written(std::ostream& os) {
  if (!os) throw FormatError("write failed");
}

std::uint32_t get_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw FormatError(std::string("truncated file reading ") + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::vector<double> get_values(std::istream& is, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(std::bit_cast<float>(get_u32(is, "values")));
  return out;
}

void expect_magic(std::istream& is, const Magic& m) {
  Magic got{};
  if (!is.read(got.data(), 4)) throw FormatError("file too short for a header");
  if (got != m)
    throw FormatError("bad magic '" + std::string(got.begin(), got.end()) + "', expected '" +
                      std::string(m.begin(), m.end()) + "'");
}

void expect_end(std::istream& is) {
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path.string() + "'");
  return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot create '" + path.string() + "'");
  return os;
}

}  // namespace

void write_factor(std::ostream& os, const DebutFactor& f) {
  const FactorShape& sh = f.shape();
  put_magic(os, kFactorMagic);
  for (const std::size_t v : {sh.p, sh.q, sh.r, sh.s, sh.t}) put_u32(os, narrow(v, "factor dim"));
  put_values(os, f.values());
  check_written(os);
}

DebutFactor read_factor(std::istream& is) {
  expect_magic(is, kFactorMagic);
  FactorShape sh;
  sh.p = get_u32(is, "p");
  sh.q = get_u32(is, "q");
  sh.r = get_u32(is, "r");
  sh.s = get_u32(is, "s");
  sh.t = get_u32(is, "t");
  try {
    check_shape(sh);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("bad factor header: ") + e.what());
  }
  auto values = get_values(is, sh.p * sh.s);
  expect_end(is);
  return DebutFactor(sh, std::move(values));
}

void write_matrix(std::ostream& os, const DenseMatrix& m) {
  put_magic(os, kMatrixMagic);
  put_u32(os, narrow(m.rows(), "rows"));
  put_u32(os, narrow(m.cols(), "cols"));
  put_values(os, m.values());
  check_written(os);
}

DenseMatrix read_matrix(std::istream& is) {
  expect_magic(is, kMatrixMagic);
  const std::size_t rows = get_u32(is, "rows");
  const std::size_t cols = get_u32(is, "cols");
  auto values = get_values(is, rows * cols);
  expect_end(is);
  return DenseMatrix(rows, cols, std::move(values));
}

void write_tensor(std::ostream& os, const Tensor3& x) {
  put_magic(os, kTensorMagic);
  put_u32(os, narrow(x.channels(), "channels"));
  put_u32(os, narrow(x.height(), "height"));
  put_u32(os, narrow(x.width(), "width"));
  put_values(os, x.data());
  check_written(os);
}

Tensor3 read_tensor(std::istream& is) {
  expect_magic(is, kTensorMagic);
  const std::size_t c = get_u32(is, "channels");
  const std::size_t h = get_u32(is, "height");
  const std::size_t w = get_u32(is, "width");
  auto values = get_values(is, c * h * w);
  expect_end(is);
  return Tensor3(c, h, w, std::move(values));
}

void write_matrix_csv(std::ostream& os, const DenseMatrix& m) {
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j];
    os << '\n';
  }
  check_written(os);
}

DenseMatrix read_matrix_csv(std::istream& is) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t n = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      std::size_t a = pos;
      std::size_t b = end;
      while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
      while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
      double v = 0.0;
      const auto res = std::from_chars(line.data() + a, line.data() + b, v);
      if (a == b || res.ec != std::errc{} || res.ptr != line.data() + b)
        throw FormatError("csv line " + std::to_string(lineno) + ": bad number '" + line.substr(a, b - a) + "'");
      values.push_back(v);
      ++n;
      if (end == line.size()) break;
      pos = end + 1;
    }
    if (rows == 0) cols = n;
    else if (n != cols)
      throw FormatError("csv line " + std::to_string(lineno) + " has " + std::to_string(n) + " fields, expected " +
                        std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw FormatError("empty csv matrix");
  return DenseMatrix(rows, cols, std::move(values));
}

std::string read_text_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_factor_file(const std::filesystem::path& path, const DebutFactor& f) {
  auto os = open_out(path);
  write_factor(os, f);
}

DebutFactor read_factor_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_factor(is);
}

void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& m) {
  auto os = open_out(path);
  write_matrix(os, m);
}

DenseMatrix read_matrix_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_matrix(is);
}

DenseMatrix read_matrix_any(const std::filesystem::path& path) {
  auto is = open_in(path);
  Magic head{};
  is.read(head.data(), 4);
  const bool binary = is.gcount() == 4 && head == kMatrixMagic;
  is.clear();
  is.seekg(0);
  return binary ? read_matrix(is) : read_matrix_csv(is);
}

void write_matrix_csv_file(const std::filesystem::path& path, const DenseMatrix& m) {
  auto os = open_out(path);
  write_matrix_csv(os, m);
}

void write_tensor_file(const std::filesystem::path& path, const Tensor3& x) {
  auto os = open_out(path);
  write_tensor(os, x);
}

Tensor3 read_tensor_file(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_tensor(is);
}

ChainSpec read_chain_file(const std::filesystem::path& path) { return parse_chain(read_text_file(path)); }

ModelManifest read_manifest_file(const std::filesystem::path& path) {
  return parse_manifest(read_text_file(path));
}

void write_chain_dir(const std::filesystem::path& dir, const DebutChain& c) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < c.size(); ++i)
    write_factor_file(dir / ("factor_" + std::to_string(i) + ".dbf"), c.factor(i));
  auto os = open_out(dir / "chain.txt");
  os << format_chain(c.spec()) << '\n';
  check_written(os);
}

DebutChain read_chain_dir(const std::filesystem::path& dir) {
  std::vector<DebutFactor> factors;
  for (std::size_t i = 0;; ++i) {
    const auto path = dir / ("factor_" + std::to_string(i) + ".dbf");
    if (!std::filesystem::exists(path)) break;
    factors.push_back(read_factor_file(path));
  }
  if (factors.empty()) throw FormatError("no factor_0.dbf in '" + dir.string() + "'");
  return DebutChain(std::move(factors));
}

void write_error_history(const std::filesystem::path& path, double initial, const std::vector<double>& history) {
  auto os = open_out(path);
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "step,relative_error\n0," << initial << '\n';
  for (std::size_t i = 0; i < history.size(); ++i) os << i + 1 << ',' << history[i] << '\n';
  check_written(os);
}

}  // namespace debut
