#include "debut/generator.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <tuple>

#include "debut/error.hpp"

namespace debut {

namespace {

using Seq = std::vector<std::size_t>;

// Orderings of odd * 2^h followed by 2^(e-h) split into n-1 near-equal powers of two.
std::vector<Seq> side_sequences(std::size_t value, std::size_t n) {
  std::size_t odd = value;
  std::size_t e = 0;
  while (odd % 2 == 0) {
    odd /= 2;
    ++e;
  }
  std::set<Seq> out;
  for (std::size_t h = 0; h <= e; ++h) {
    const std::size_t rest = e - h;
    Seq seq{odd << h};
    if (n == 1) {
      if (rest == 0) out.insert(seq);
      continue;
    }
    const std::size_t base = rest / (n - 1);
    const std::size_t extra = rest % (n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) seq.push_back(std::size_t{1} << (base + (i < extra ? 1 : 0)));
    std::sort(seq.begin(), seq.end());
    do {
      out.insert(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));
  }
  return {out.begin(), out.end()};
}

bool monotone(const Seq& dims) {
  return std::is_sorted(dims.begin(), dims.end()) || std::is_sorted(dims.rbegin(), dims.rend());
}

bool single_peak(const Seq& dims, double limit) {
  const auto peak = std::max_element(dims.begin(), dims.end());
  if (peak == dims.begin() || peak == dims.end() - 1) return false;
  if (*peak <= dims.front() || *peak <= dims.back()) return false;
  if (static_cast<double>(*peak) > limit) return false;
  return std::is_sorted(dims.begin(), peak + 1) && std::is_sorted(std::make_reverse_iterator(dims.end()),
                                                                  std::make_reverse_iterator(peak));
}

struct Candidate {
  std::size_t nnz;
  Seq r;
  Seq s;
  ChainSpec spec;

  auto key() const { return std::tie(nnz, r, s); }
};

}  // namespace

ChainStyle parse_style(std::string_view name) {
  if (name == "monotonic") return ChainStyle::monotonic;
  if (name == "bulging") return ChainStyle::bulging;
  throw ParseError("unknown chain style '" + std::string(name) + "' (expected monotonic or bulging)");
}

std::string_view to_string(ChainStyle style) { return style == ChainStyle::monotonic ? "monotonic" : "bulging"; }

std::vector<ChainSpec> generate_chains(std::size_t rows_out, std::size_t cols_in, ChainStyle style,
                                       const GeneratorOptions& opts) {
  if (rows_out == 0 || cols_in == 0) throw ShapeError(ShapeErrorKind::positivity, "chain dims must be positive");
  const double limit = opts.max_bulge_ratio * static_cast<double>(std::max(rows_out, cols_in));

  std::vector<Candidate> found;
  for (std::size_t n = 1; n <= opts.max_factors; ++n) {
    const auto rseqs = side_sequences(rows_out, n);
    const auto sseqs = side_sequences(cols_in, n);
    for (const Seq& r : rseqs) {
      for (const Seq& s : sseqs) {
        Seq dims{cols_in};
        ChainSpec spec;
        std::size_t rprod = 1;
        std::size_t sprod = 1;
        std::size_t nnz = 0;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
          const std::size_t t = rprod;
          rprod *= r[i];
          sprod *= s[i];
          const std::size_t q = dims.back();
          if ((rprod * cols_in) % sprod != 0) {
            ok = false;
            break;
          }
          const std::size_t p = rprod * cols_in / sprod;
          ok = p % (r[i] * t) == 0 && q % (s[i] * t) == 0 && p / (r[i] * t) == q / (s[i] * t);
          spec.factors.push_back({p, q, r[i], s[i], t});
          dims.push_back(p);
          nnz += p * s[i];
        }
        if (!ok) continue;
        if (style == ChainStyle::monotonic ? !monotone(dims) : !single_peak(dims, limit)) continue;
        found.push_back({nnz, r, s, std::move(spec)});
      }
    }
  }
  if (found.empty())
    throw NoChainFound("no " + std::string(to_string(style)) + " chain for " + std::to_string(rows_out) + " x " +
                       std::to_string(cols_in) + " within " + std::to_string(opts.max_factors) + " factors");

  std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.nnz != b.nnz) return a.nnz < b.nnz;
    if (a.r.size() != b.r.size()) return a.r.size() < b.r.size();
    return a.key() < b.key();
  });
  if (found.size() > opts.max_candidates) found.resize(opts.max_candidates);

  std::vector<ChainSpec> out;
  out.reserve(found.size());
  for (auto& c : found) {
    if (!validate(c.spec).valid())
      throw Error("generator produced an invalid chain: " + format_chain(c.spec));
    out.push_back(std::move(c.spec));
  }
  return out;
}

}  // namespace debut
