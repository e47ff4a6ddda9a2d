#include "debut/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "debut/error.hpp"

namespace debut {

namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + " x " + std::to_string(c);
}

template <bool kCount>
void apply_block(const DebutFactor& f, const DenseMatrix& x, DenseMatrix& y, std::size_t c0,
                 std::size_t width, std::uint64_t& macs) {
  const FactorShape& sh = f.shape();
  const auto v = f.values();
  const std::size_t n = x.cols();
  const double* xd = x.data().data();
  double* yd = y.data().data();
  std::size_t flat = 0;
  for (std::size_t d = 0; d < sh.blocks(); ++d) {
    const std::size_t row0 = d * sh.r * sh.t;
    const std::size_t col0 = d * sh.s * sh.t;
    for (std::size_t i = 0; i < sh.r; ++i) {
      for (std::size_t j = 0; j < sh.s; ++j) {
        for (std::size_t k = 0; k < sh.t; ++k, ++flat) {
          const double w = v[flat];
          double* yr = yd + (row0 + i * sh.t + k) * n + c0;
          const double* xr = xd + (col0 + j * sh.t + k) * n + c0;
          for (std::size_t c = 0; c < width; ++c) yr[c] += w * xr[c];
          if constexpr (kCount) macs += width;
        }
      }
    }
  }
}

template <bool kCount>
void apply_transposed_block(const DebutFactor& f, const DenseMatrix& x, DenseMatrix& y,
                            std::size_t c0, std::size_t width, std::uint64_t& macs) {
  const FactorShape& sh = f.shape();
  const auto v = f.values();
  const std::size_t n = x.cols();
  const double* xd = x.data().data();
  double* yd = y.data().data();
  std::size_t flat = 0;
  for (std::size_t d = 0; d < sh.blocks(); ++d) {
    const std::size_t row0 = d * sh.r * sh.t;
    const std::size_t col0 = d * sh.s * sh.t;
    for (std::size_t i = 0; i < sh.r; ++i) {
      for (std::size_t j = 0; j < sh.s; ++j) {
        for (std::size_t k = 0; k < sh.t; ++k, ++flat) {
          const double w = v[flat];
          double* yr = yd + (col0 + j * sh.t + k) * n + c0;
          const double* xr = xd + (row0 + i * sh.t + k) * n + c0;
          for (std::size_t c = 0; c < width; ++c) yr[c] += w * xr[c];
          if constexpr (kCount) macs += width;
        }
      }
    }
  }
}

template <typename Block>
DenseMatrix run_blocked(std::size_t out_rows, const DenseMatrix& x, MacCounter* counter, Block block) {
  DenseMatrix y(out_rows, x.cols());
  std::uint64_t macs = 0;
  for (std::size_t c0 = 0; c0 < x.cols(); c0 += kColumnBlock) {
    const std::size_t width = std::min(kColumnBlock, x.cols() - c0);
    if (counter)
      block.template operator()<true>(y, c0, width, macs);
    else
      block.template operator()<false>(y, c0, width, macs);
  }
  if (counter) counter->macs += macs;
  return y;
}

DenseMatrix column_slice(const DenseMatrix& x, std::size_t c0, std::size_t c1) {
  DenseMatrix out(x.rows(), c1 - c0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto src = x.row(r);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(c0), src.begin() + static_cast<std::ptrdiff_t>(c1),
              out.row(r).begin());
  }
  return out;
}

DenseMatrix apply_sequential(const DebutChain& c, const DenseMatrix& x, MacCounter* counter) {
  DenseMatrix cur = factor_apply(c.factor(0), x, counter);
  for (std::size_t i = 1; i < c.size(); ++i) cur = factor_apply(c.factor(i), cur, counter);
  return cur;
}

}  // namespace

DenseMatrix factor_apply(const DebutFactor& f, const DenseMatrix& x, MacCounter* counter) {
  if (x.rows() != f.cols())
    throw DimensionError("factor " + to_string(f.shape()) + " cannot multiply a " + dims(x.rows(), x.cols()) +
                         " matrix");
  return run_blocked(f.rows(), x, counter,
                     [&]<bool kCount>(DenseMatrix& y, std::size_t c0, std::size_t w, std::uint64_t& macs) {
                       apply_block<kCount>(f, x, y, c0, w, macs);
                     });
}

DenseMatrix factor_apply_transposed(const DebutFactor& f, const DenseMatrix& x, MacCounter* counter) {
  if (x.rows() != f.rows())
    throw DimensionError("transposed factor " + to_string(f.shape()) + " cannot multiply a " +
                         dims(x.rows(), x.cols()) + " matrix");
  return run_blocked(f.cols(), x, counter,
                     [&]<bool kCount>(DenseMatrix& y, std::size_t c0, std::size_t w, std::uint64_t& macs) {
                       apply_transposed_block<kCount>(f, x, y, c0, w, macs);
                     });
}

DenseMatrix chain_apply(const DebutChain& c, const DenseMatrix& x, const ApplyOptions& opts) {
  if (x.rows() != c.cols_in())
    throw DimensionError("chain " + dims(c.rows_out(), c.cols_in()) + " cannot multiply a " +
                         dims(x.rows(), x.cols()) + " matrix");
  const std::size_t nblocks = (x.cols() + kColumnBlock - 1) / kColumnBlock;
  const std::size_t workers = std::min<std::size_t>(std::max(1u, opts.threads), nblocks);
  if (workers <= 1) return apply_sequential(c, x, opts.counter);

  // Contiguous ranges of whole column blocks, one per worker.
  std::vector<std::size_t> bounds(workers + 1);
  for (std::size_t w = 0; w <= workers; ++w) bounds[w] = std::min(x.cols(), (nblocks * w / workers) * kColumnBlock);
  std::vector<DenseMatrix> parts(workers);
  std::vector<MacCounter> counts(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        parts[w] = apply_sequential(c, column_slice(x, bounds[w], bounds[w + 1]),
                                    opts.counter ? &counts[w] : nullptr);
      });
    }
  }
  DenseMatrix y(c.rows_out(), x.cols());
  for (std::size_t w = 0; w < workers; ++w) {
    for (std::size_t r = 0; r < y.rows(); ++r) {
      const auto src = parts[w].row(r);
      std::copy(src.begin(), src.end(), y.row(r).begin() + static_cast<std::ptrdiff_t>(bounds[w]));
    }
    if (opts.counter) opts.counter->macs += counts[w].macs;
  }
  return y;
}

DenseMatrix chain_apply_transposed(const DebutChain& c, const DenseMatrix& x) {
  if (x.rows() != c.rows_out())
    throw DimensionError("transposed chain " + dims(c.cols_in(), c.rows_out()) + " cannot multiply a " +
                         dims(x.rows(), x.cols()) + " matrix");
  DenseMatrix cur = factor_apply_transposed(c.factor(c.size() - 1), x);
  for (std::size_t i = c.size() - 1; i-- > 0;) cur = factor_apply_transposed(c.factor(i), cur);
  return cur;
}

DenseMatrix materialize(const DebutFactor& f) {
  DenseMatrix m(f.rows(), f.cols());
  const auto v = f.values();
  for (const auto& pos : positions(f.shape())) m(pos.row, pos.col) = v[pos.index];
  return m;
}

DenseMatrix materialize_product(std::span<const DebutFactor> run) {
  if (run.empty()) throw DimensionError("cannot materialize an empty factor run");
  for (std::size_t i = 1; i < run.size(); ++i)
    if (run[i].cols() != run[i - 1].rows())
      throw DimensionError("factor run is not adjacent at junction " + std::to_string(i));

  const std::size_t in_dim = run.front().cols();
  const std::size_t out_dim = run.back().rows();
  std::size_t max_dim = in_dim;
  for (const auto& f : run) max_dim = std::max(max_dim, f.rows());

  // Propagate e_j through the run, touching only structurally nonzero entries.
  DenseMatrix out(out_dim, in_dim);
  std::vector<double> cur(max_dim, 0.0), next(max_dim, 0.0);
  std::vector<std::size_t> support, next_support;
  std::vector<std::size_t> stamp(max_dim, 0);
  std::size_t epoch = 0;
  for (std::size_t col = 0; col < in_dim; ++col) {
    support.assign(1, col);
    cur[col] = 1.0;
    for (const auto& f : run) {
      const FactorShape& sh = f.shape();
      const auto v = f.values();
      const std::size_t st = sh.s * sh.t;
      ++epoch;
      next_support.clear();
      for (const std::size_t c : support) {
        const double xc = cur[c];
        cur[c] = 0.0;
        const std::size_t d = c / st;
        const std::size_t jj = (c % st) / sh.t;
        const std::size_t k = c % sh.t;
        for (std::size_t i = 0; i < sh.r; ++i) {
          const std::size_t row = d * sh.r * sh.t + i * sh.t + k;
          next[row] += v[((d * sh.r + i) * sh.s + jj) * sh.t + k] * xc;
          if (stamp[row] != epoch) {
            stamp[row] = epoch;
            next_support.push_back(row);
          }
        }
      }
      std::swap(cur, next);
      std::swap(support, next_support);
    }
    for (const std::size_t row : support) {
      out(row, col) = cur[row];
      cur[row] = 0.0;
    }
  }
  return out;
}

DenseMatrix materialize(const DebutChain& c) { return materialize_product(c.factors()); }

DenseMatrix dense_multiply(const DenseMatrix& a, const DenseMatrix& b, MacCounter* counter) {
  if (a.cols() != b.rows())
    throw DimensionError("cannot multiply " + dims(a.rows(), a.cols()) + " by " + dims(b.rows(), b.cols()));
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  if (counter) counter->macs += static_cast<std::uint64_t>(a.rows()) * a.cols() * b.cols();
  return c;
}

BipolarReport bipolar_check(const DenseMatrix& m) {
  BipolarReport rep;
  rep.total_entries = m.size();
  for (const double x : m.data()) {
    if (x == 0.0)
      ++rep.zero_entries;
    else if (std::abs(std::abs(x) - 1.0) > kBipolarTolerance)
      ++rep.non_bipolar_entries;
  }
  rep.pass = rep.zero_entries == 0 && rep.non_bipolar_entries == 0;
  return rep;
}

BipolarReport bipolar_test(const ChainSpec& spec, std::uint64_t seed) {
  return bipolar_check(materialize(random_chain(spec, InitScheme::bipolar(), seed)));
}

std::string sign_grid(const DenseMatrix& m) {
  std::string out;
  out.reserve(m.rows() * (m.cols() + 1));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (const double x : m.row(r)) {
      if (x == 0.0)
        out += '.';
      else if (std::abs(x - 1.0) <= kBipolarTolerance)
        out += '+';
      else if (std::abs(x + 1.0) <= kBipolarTolerance)
        out += '-';
      else
        out += '*';
    }
    out += '\n';
  }
  return out;
}

}  // namespace debut

namespace debut {

double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (const double x : m.data()) acc += x * x;
  return std::sqrt(acc);
}

double frobenius_distance(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("cannot compare " + dims(a.rows(), a.cols()) + " with " + dims(b.rows(), b.cols()));
  double acc = 0.0;
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) acc += (ad[i] - bd[i]) * (ad[i] - bd[i]);
  return std::sqrt(acc);
}

}  // namespace debut
