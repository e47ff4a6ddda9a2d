#include "debut/chain.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <sstream>

#include "debut/error.hpp"
#include "debut/rng.hpp"

namespace debut {

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) return std::numeric_limits<std::size_t>::max();
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Lines with comments stripped, blank lines dropped.
std::vector<std::string_view> content_lines(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  std::size_t number() {
    skip_ws();
    std::size_t value = 0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first) fail("expected a positive integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }
  void expect(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) != tok) fail("expected '" + std::string(tok) + "'");
    pos_ += tok.size();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "chain text, column " << pos_ + 1 << ": " << msg << " in \"" << s_ << '"';
    throw ParseError(os.str());
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

ChainSpec parse_arrow(std::string_view line) {
  Scanner sc(line);
  std::vector<FactorShape> left_first;
  std::size_t p = sc.number();
  while (!sc.done()) {
    sc.expect("<-(");
    const std::size_t r = sc.number();
    sc.expect(",");
    const std::size_t s = sc.number();
    sc.expect(",");
    const std::size_t t = sc.number();
    sc.expect(")-");
    const std::size_t q = sc.number();
    left_first.push_back({p, q, r, s, t});
    p = q;
  }
  if (left_first.empty()) sc.fail("no factors");
  return {{left_first.rbegin(), left_first.rend()}};
}

ChainSpec parse_lines(const std::vector<std::string_view>& lines) {
  std::vector<FactorShape> left_first;
  for (auto line : lines) {
    Scanner sc(line);
    FactorShape sh{};
    sh.p = sc.number();
    sh.q = sc.number();
    sh.r = sc.number();
    sh.s = sc.number();
    sh.t = sc.number();
    if (!sc.done()) sc.fail("expected exactly five integers `p q r s t`");
    left_first.push_back(sh);
  }
  return {{left_first.rbegin(), left_first.rend()}};
}

}  // namespace

std::size_t ChainSpec::total_nonzeros() const {
  std::size_t total = 0;
  for (const auto& f : factors) total += nonzero_count(f);
  return total;
}

void check_adjacency(const ChainSpec& spec) {
  if (spec.empty()) throw AdjacencyError("empty chain");
  for (const auto& f : spec.factors) check_shape(f);
  for (std::size_t i = 1; i < spec.size(); ++i) {
    if (spec.factors[i].q != spec.factors[i - 1].p) {
      std::ostringstream os;
      os << "junction " << i << ": factor " << i << " has q = " << spec.factors[i].q
         << " but factor " << i - 1 << " has p = " << spec.factors[i - 1].p;
      throw AdjacencyError(os.str());
    }
  }
}

ChainSpec parse_chain_unchecked(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ParseError("chain text is empty");
  if (lines.front().find("<-") != std::string_view::npos) return parse_arrow(lines.front());
  return parse_lines(lines);
}

ChainSpec parse_chain(std::string_view text) {
  ChainSpec spec = parse_chain_unchecked(text);
  check_adjacency(spec);
  return spec;
}

std::string format_chain(const ChainSpec& spec) {
  if (spec.empty()) return {};
  std::ostringstream os;
  os << spec.rows_out();
  for (std::size_t i = spec.size(); i-- > 0;) {
    const auto& f = spec.factors[i];
    os << " <-(" << f.r << ',' << f.s << ',' << f.t << ")- " << f.q;
  }
  return os.str();
}

bool ValidationReport::shapes_pass() const {
  return !shapes_ok.empty() && std::ranges::all_of(shapes_ok, [](bool b) { return b; });
}
bool ValidationReport::adjacency_pass() const {
  return !shapes_ok.empty() && std::ranges::all_of(adjacency_ok, [](bool b) { return b; });
}
bool ValidationReport::densification_pass() const {
  return !shapes_ok.empty() && std::ranges::all_of(densification_ok, [](bool b) { return b; });
}

ValidationReport validate(const ChainSpec& spec) {
  ValidationReport rep;
  if (spec.empty()) {
    rep.messages.emplace_back("empty chain");
    return rep;
  }
  const std::size_t n = spec.size();
  rep.shapes_ok.assign(n, true);
  rep.adjacency_ok.assign(n - 1, true);
  rep.densification_ok.assign(n, true);

  for (std::size_t i = 0; i < n; ++i) {
    try {
      check_shape(spec.factors[i]);
    } catch (const ShapeError& e) {
      rep.shapes_ok[i] = false;
      rep.messages.push_back("factor " + std::to_string(i) + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (spec.factors[i].q != spec.factors[i - 1].p) {
      rep.adjacency_ok[i - 1] = false;
      std::ostringstream os;
      os << "junction " << i << ": factor " << i << " has q = " << spec.factors[i].q
         << " but factor " << i - 1 << " has p = " << spec.factors[i - 1].p;
      rep.messages.push_back(os.str());
    }
  }
  std::size_t r_acc = 1;
  std::size_t s_acc = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = spec.factors[i];
    if (f.t != r_acc) {
      rep.densification_ok[i] = false;
      std::ostringstream os;
      os << "factor " << i << ": t = " << f.t << " but densification needs t = " << r_acc
         << (i == 0 ? " (rightmost factor must have t = 1)" : " (product of r over factors to its right)");
      rep.messages.push_back(os.str());
    }
    r_acc = saturating_mul(r_acc, f.r);
    s_acc = saturating_mul(s_acc, f.s);
  }
  rep.full_density_ok = r_acc == spec.rows_out() && s_acc == spec.cols_in();
  if (!rep.full_density_ok) {
    std::ostringstream os;
    os << "full density: prod r = " << r_acc << " (need " << spec.rows_out() << "), prod s = " << s_acc
       << " (need " << spec.cols_in() << ")";
    rep.messages.push_back(os.str());
  }
  return rep;
}

std::vector<PartialProductShape> partial_products(const ChainSpec& spec) {
  const ValidationReport rep = validate(spec);
  if (!rep.densification_pass() || !rep.adjacency_pass()) {
    std::string msg = "chain does not densify";
    for (const auto& m : rep.messages) msg += "; " + m;
    throw DensificationError(msg);
  }
  std::vector<PartialProductShape> out;
  out.reserve(spec.size());
  std::size_t r_acc = 1;
  std::size_t s_acc = 1;
  for (const auto& f : spec.factors) {
    r_acc *= f.r;
    s_acc *= f.s;
    out.push_back({f.p, spec.cols_in(), r_acc, s_acc, 1});
  }
  return out;
}

double layer_compression(const ChainSpec& spec) {
  const double dense = static_cast<double>(spec.rows_out()) * static_cast<double>(spec.cols_in());
  return 1.0 - static_cast<double>(spec.total_nonzeros()) / dense;
}

std::size_t ModelManifest::total_params() const {
  std::size_t total = model_extra;
  for (const auto& l : layers) total += l.weight_params() + l.bias_count + l.extra_params;
  return total;
}

const LayerEntry* ModelManifest::find(std::string_view name) const {
  for (const auto& l : layers)
    if (l.name == name) return &l;
  return nullptr;
}

ModelManifest parse_manifest(std::string_view text) {
  ModelManifest m;
  for (auto line : content_lines(text)) {
    std::istringstream is{std::string(line)};
    std::string name;
    is >> name;
    if (name == "model_extra") {
      if (!(is >> m.model_extra)) throw ParseError("manifest: bad model_extra line: " + std::string(line));
    } else {
      LayerEntry e;
      e.name = name;
      if (!(is >> e.c_in >> e.c_out >> e.k >> e.bias_count >> e.extra_params))
        throw ParseError("manifest: expected `name c_i c_o k bias_count extra_params`: " + std::string(line));
      if (m.find(e.name)) throw ParseError("manifest: duplicate layer " + e.name);
      m.layers.push_back(std::move(e));
    }
    std::string junk;
    if (is >> junk) throw ParseError("manifest: trailing tokens: " + std::string(line));
  }
  return m;
}

ModelCompression model_compression(const ModelManifest& manifest,
                                   const std::map<std::string, ChainSpec>& replacements) {
  ModelCompression out;
  out.total_params = static_cast<std::int64_t>(manifest.total_params());
  for (const auto& [name, spec] : replacements) {
    const LayerEntry* layer = manifest.find(name);
    if (!layer) throw UnknownLayer("manifest has no layer named " + name);
    if (spec.empty() || spec.rows_out() != layer->c_out || spec.cols_in() != layer->k * layer->k * layer->c_in) {
      std::ostringstream os;
      os << "chain for " << name << " is " << (spec.empty() ? 0 : spec.rows_out()) << " x "
         << (spec.empty() ? 0 : spec.cols_in()) << " but the layer flattens to " << layer->c_out << " x "
         << layer->k * layer->k * layer->c_in;
      throw ShapeMismatch(os.str());
    }
    out.saved_params += static_cast<std::int64_t>(layer->weight_params()) -
                        static_cast<std::int64_t>(spec.total_nonzeros());
  }
  out.remaining_params = out.total_params - out.saved_params;
  out.ratio = out.total_params == 0 ? 0.0
                                    : static_cast<double>(out.saved_params) / static_cast<double>(out.total_params);
  return out;
}

CostEstimate estimate_cost(const ChainSpec& spec, const std::optional<ConvShape>& conv) {
  CostEstimate c;
  c.num_factors = spec.size();
  for (const auto& f : spec.factors) {
    const std::uint64_t nnz = nonzero_count(f);
    c.debut_nonzeros_total += nnz;
    c.max_factor_nonzeros = std::max(c.max_factor_nonzeros, nnz);
  }
  c.debut_macs_per_column = c.debut_nonzeros_total;
  c.gemm_macs_per_column = static_cast<std::uint64_t>(spec.rows_out()) * spec.cols_in();
  if (conv) {
    if (spec.rows_out() != conv->kernel_rows() || spec.cols_in() != conv->kernel_cols()) {
      std::ostringstream os;
      os << "chain is " << spec.rows_out() << " x " << spec.cols_in() << " but the convolution needs "
         << conv->kernel_rows() << " x " << conv->kernel_cols();
      throw ShapeMismatch(os.str());
    }
    const OutputShape out = output_shape(*conv);
    c.num_columns = static_cast<std::uint64_t>(out.height) * out.width;
  }
  return c;
}

DebutChain::DebutChain(std::vector<DebutFactor> factors) : factors_(std::move(factors)) {
  spec_.factors.reserve(factors_.size());
  for (const auto& f : factors_) spec_.factors.push_back(f.shape());
  check_adjacency(spec_);
}

void DebutChain::set_factor(std::size_t i, DebutFactor f) {
  if (i >= factors_.size()) throw IndexError("factor index " + std::to_string(i) + " out of range");
  if (!(f.shape() == factors_[i].shape()))
    throw ShapeMismatch("replacement factor " + to_string(f.shape()) + " does not match " +
                        to_string(factors_[i].shape()));
  factors_[i] = std::move(f);
}

DebutChain random_chain(const ChainSpec& spec, const InitScheme& scheme, std::uint64_t seed) {
  check_adjacency(spec);
  std::vector<DebutFactor> fs;
  fs.reserve(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) fs.push_back(random_init(spec.factors[i], scheme, mix_seed(seed, i)));
  return DebutChain(std::move(fs));
}

}  // namespace debut
