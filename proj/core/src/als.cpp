#include "debut/als.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "debut/error.hpp"
#include "debut/kernels.hpp"

namespace debut {

namespace {

// One side of the lumped product. `m` holds L^T (p x rows(F)) on the left and
// R (q x cols(F)) on the right, so both Gram factors are row dot products.
struct Lump {
  bool identity = false;
  std::size_t n = 0;
  DenseMatrix m;

  double gram(std::size_t a, std::size_t b) const {
    if (identity) return a == b ? 1.0 : 0.0;
    const auto x = m.row(a);
    const auto y = m.row(b);
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  }
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Pairs of rows of `lump` sharing a nonzero column, as neighbour lists (self included).
std::vector<std::vector<std::size_t>> row_coupling(const Lump& lump) {
  std::vector<std::vector<std::size_t>> nb(lump.n);
  if (lump.identity) {
    for (std::size_t a = 0; a < lump.n; ++a) nb[a] = {a};
    return nb;
  }
  const DenseMatrix& m = lump.m;
  std::vector<std::vector<std::size_t>> by_col(m.cols());
  for (std::size_t a = 0; a < m.rows(); ++a) {
    const auto row = m.row(a);
    for (std::size_t x = 0; x < m.cols(); ++x)
      if (row[x] != 0.0) by_col[x].push_back(a);
  }
  std::vector<bool> seen(lump.n * lump.n, false);
  for (const auto& rows : by_col)
    for (const std::size_t a : rows)
      for (const std::size_t b : rows) seen[a * lump.n + b] = true;
  for (std::size_t a = 0; a < lump.n; ++a) {
    seen[a * lump.n + a] = true;
    for (std::size_t b = 0; b < lump.n; ++b)
      if (seen[a * lump.n + b]) nb[a].push_back(b);
  }
  return nb;
}

std::vector<std::vector<std::size_t>> components(const FactorShape& sh, const Lump& left, const Lump& right) {
  const auto pos = positions(sh);
  const auto lnb = row_coupling(left);
  const auto rnb = row_coupling(right);
  std::vector<bool> rcouple(right.n * right.n, false);
  for (std::size_t b = 0; b < right.n; ++b)
    for (const std::size_t b2 : rnb[b]) rcouple[b * right.n + b2] = true;

  std::vector<std::vector<std::size_t>> by_row(sh.p);
  for (const auto& ps : pos) by_row[ps.row].push_back(ps.index);

  DisjointSets sets(pos.size());
  for (const auto& u : pos)
    for (const std::size_t a2 : lnb[u.row])
      for (const std::size_t v : by_row[a2])
        if (v > u.index && rcouple[u.col * right.n + pos[v].col]) sets.unite(u.index, v);

  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> slot(pos.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t u = 0; u < pos.size(); ++u) {
    const std::size_t root = sets.find(u);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = comps.size();
      comps.emplace_back();
    }
    comps[slot[root]].push_back(u);
  }
  return comps;
}

// `t` is L^T F (p x cols(F)); the right-hand side of unknown (a, b) is t[a,:] . R[b,:].
std::vector<double> solve_components(const FactorShape& sh, const Lump& left, const Lump& right, const DenseMatrix& t,
                                     double ridge) {
  const auto pos = positions(sh);
  auto rhs_of = [&](const Position& u) {
    if (right.identity) return t(u.row, u.col);
    const auto x = t.row(u.row);
    const auto y = right.m.row(u.col);
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  };
  const double lambda_base = std::max(ridge, 1e-8);

  std::vector<double> values(pos.size(), 0.0);
  for (const auto& comp : components(sh, left, right)) {
    const std::size_t n = comp.size();
    Eigen::MatrixXd g(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Position& u = pos[comp[i]];
      rhs(static_cast<Eigen::Index>(i)) = rhs_of(u);
      for (std::size_t j = 0; j <= i; ++j) {
        const Position& v = pos[comp[j]];
        const double gij = left.gram(u.row, v.row) * right.gram(u.col, v.col);
        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gij;
        g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = gij;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    Eigen::VectorXd sol;
    if (llt.info() == Eigen::Success) {
      sol = llt.solve(rhs);
    } else {
      const double mean_diag = g.diagonal().cwiseAbs().mean();
      g.diagonal().array() += lambda_base * std::max(1.0, mean_diag);
      llt.compute(g);
      if (llt.info() != Eigen::Success)
        throw SingularSystem("normal equations of a " + std::to_string(n) + "-unknown component are singular");
      sol = llt.solve(rhs);
    }
    if (!sol.allFinite()) throw SingularSystem("non-finite least-squares solution");
    for (std::size_t i = 0; i < n; ++i) values[comp[i]] = sol(static_cast<Eigen::Index>(i));
  }
  return values;
}

Lump left_lump(const DebutChain& c, std::size_t idx) {
  const std::size_t p = c.factor(idx).rows();
  if (idx + 1 == c.size()) return {true, p, {}};
  std::span<const DebutFactor> run(c.factors().data() + idx + 1, c.size() - idx - 1);
  return {false, p, materialize_product(run).transposed()};
}

Lump right_lump(const DebutChain& c, std::size_t idx) {
  const std::size_t q = c.factor(idx).cols();
  if (idx == 0) return {true, q, {}};
  return {false, q, materialize_product(std::span<const DebutFactor>(c.factors().data(), idx))};
}

// L^T F through the transposed factors to the left of idx.
DenseMatrix left_project(const DebutChain& c, std::size_t idx, const DenseMatrix& f) {
  DenseMatrix cur = f;
  for (std::size_t i = c.size(); i-- > idx + 1;) cur = factor_apply_transposed(c.factor(i), cur);
  return cur;
}

void check_index(const DebutChain& c, std::size_t idx) {
  if (idx >= c.size())
    throw IndexError("factor index " + std::to_string(idx) + " out of range for a " + std::to_string(c.size()) +
                     "-factor chain");
}

}  // namespace

DenseMatrix lump_side(const DebutChain& c, std::size_t idx, Side side) {
  check_index(c, idx);
  if (side == Side::left) {
    if (idx + 1 == c.size()) return DenseMatrix::identity(c.factor(idx).rows());
    return materialize_product(std::span<const DebutFactor>(c.factors().data() + idx + 1, c.size() - idx - 1));
  }
  if (idx == 0) return DenseMatrix::identity(c.factor(0).cols());
  return materialize_product(std::span<const DebutFactor>(c.factors().data(), idx));
}

FactorSolution solve_factor_ls(const DenseMatrix& f, const DenseMatrix& l, const DenseMatrix& r,
                               const FactorShape& shape, double ridge) {
  check_shape(shape);
  if (l.cols() != shape.p || r.rows() != shape.q || f.rows() != l.rows() || f.cols() != r.cols()) {
    std::ostringstream os;
    os << "least-squares dimensions: F " << f.rows() << 'x' << f.cols() << ", L " << l.rows() << 'x' << l.cols()
       << ", R " << r.rows() << 'x' << r.cols() << ", factor " << to_string(shape);
    throw DimensionError(os.str());
  }
  Lump left{false, shape.p, l.transposed()};
  Lump right{false, shape.q, r};
  const DenseMatrix t = dense_multiply(left.m, f);

  FactorSolution out;
  out.values = solve_components(shape, left, right, t, ridge);
  const DebutFactor m(shape, out.values);
  // L M = (M^T L^T)^T
  const DenseMatrix lm = factor_apply_transposed(m, left.m).transposed();
  out.residual = frobenius_distance(f, dense_multiply(lm, r));
  return out;
}

std::vector<std::vector<std::size_t>> coupling_components(const DebutChain& c, std::size_t idx) {
  check_index(c, idx);
  return components(c.factor(idx).shape(), left_lump(c, idx), right_lump(c, idx));
}

double relative_error(const DenseMatrix& f, const DenseMatrix& approx) {
  const double num = frobenius_distance(f, approx);
  const double den = frobenius_norm(f);
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

double relative_error(const DenseMatrix& f, const DebutChain& c) {
  if (f.rows() != c.rows_out() || f.cols() != c.cols_in())
    throw DimensionError("target is " + std::to_string(f.rows()) + " x " + std::to_string(f.cols()) +
                         " but the chain is " + std::to_string(c.rows_out()) + " x " + std::to_string(c.cols_in()));
  return relative_error(f, materialize(c));
}

AlsResult als_fit(const DenseMatrix& f, const ChainSpec& spec, const AlsOptions& opts) {
  check_adjacency(spec);
  if (spec.rows_out() != f.rows() || spec.cols_in() != f.cols())
    throw DimensionError("target is " + std::to_string(f.rows()) + " x " + std::to_string(f.cols()) +
                         " but the chain is " + std::to_string(spec.rows_out()) + " x " +
                         std::to_string(spec.cols_in()));
  const int max_sweeps = opts.max_sweeps.value_or(AlsOptions::default_sweeps(f.size()));
  if (max_sweeps < 1) throw Error("max_sweeps must be at least 1");

  std::vector<std::string> warnings;
  const ValidationReport rep = validate(spec);
  if (!rep.densification_pass() || !rep.full_density_ok)
    for (const auto& m : rep.messages) warnings.push_back(m);

  std::size_t max_s = 1;
  for (const auto& sh : spec.factors) max_s = std::max(max_s, sh.s);
  DebutChain chain = random_chain(spec, InitScheme::gaussian(1.0 / std::sqrt(static_cast<double>(max_s))), opts.seed);

  AlsResult res{chain, relative_error(f, chain), {}, 0, false, std::move(warnings)};

  auto solve = [&](std::size_t idx) {
    const Lump left = left_lump(res.chain, idx);
    const Lump right = right_lump(res.chain, idx);
    const DenseMatrix t = left_project(res.chain, idx, f);
    const FactorShape& sh = res.chain.factor(idx).shape();
    res.chain.set_factor(idx, DebutFactor(sh, solve_components(sh, left, right, t, opts.ridge)));
  };

  const std::size_t n = res.chain.size();
  double previous = res.initial_error;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t idx = 0; idx < n; ++idx) solve(idx);
    res.error_history.push_back(relative_error(f, res.chain));
    for (std::size_t idx = n; idx-- > 0;) solve(idx);
    const double current = relative_error(f, res.chain);
    res.error_history.push_back(current);
    res.sweeps_run = sweep;
    if (previous - current < opts.rel_tol) {
      res.converged = true;
      break;
    }
    previous = current;
  }
  return res;
}

}  // namespace debut
