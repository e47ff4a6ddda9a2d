#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "debut/als.hpp"
#include "debut/chain.hpp"
#include "debut/convolution.hpp"
#include "debut/error.hpp"
#include "debut/generator.hpp"
#include "debut/io.hpp"
#include "debut/kernels.hpp"
#include "debut/rng.hpp"

namespace debut {

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

// Where factor values come from for commands that need a bound chain.
struct ValueSource {
  std::string factors_dir;
  std::string init = "bipolar";
  double sigma = 1.0;
  std::uint64_t seed = 0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--factors", factors_dir, "Directory of factor_<i>.dbf files");
    cmd.add_option("--init", init, "Random values when --factors is absent")
        ->check(CLI::IsMember({"bipolar", "gaussian", "uniform"}));
    cmd.add_option("--sigma", sigma, "Gaussian sigma, or uniform half-width");
    cmd.add_option("--seed", seed, "Seed for random values");
  }

  DebutChain bind(const ChainSpec& spec) const {
    if (!factors_dir.empty()) {
      DebutChain c = read_chain_dir(factors_dir);
      if (!(c.spec() == spec))
        throw ShapeMismatch("factors in '" + factors_dir + "' form " + format_chain(c.spec()) +
                            ", not the requested chain");
      return c;
    }
    InitScheme scheme = InitScheme::bipolar();
    if (init == "gaussian") scheme = InitScheme::gaussian(sigma);
    if (init == "uniform") scheme = InitScheme::uniform(-sigma, sigma);
    return random_chain(spec, scheme, seed);
  }
};

ConvShape parse_conv(const std::string& text) {
  std::vector<std::size_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long x = std::stoll(item, &used);
      if (used != item.size() || x < 0) throw std::invalid_argument(item);
      v.push_back(static_cast<std::size_t>(x));
    } catch (const std::logic_error&) {
      throw ParseError("--conv: bad integer '" + item + "'");
    }
  }
  if (v.size() != 7) throw ParseError("--conv expects c_i,c_o,k,stride,pad,H,W");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

std::string percent(double ratio) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << ratio * 100.0 << '%';
  return os.str();
}

void write_matrix_as(const fs::path& path, const DenseMatrix& m, const std::string& format) {
  if (format == "csv") write_matrix_csv_file(path, m);
  else write_matrix_file(path, m);
}

void print_report(std::ostream& out, const ValidationReport& rep) {
  auto flags = [&](const char* name, const std::vector<bool>& v, bool pass) {
    out << name << ": " << (pass ? "ok" : "FAIL");
    if (!v.empty()) {
      out << " [";
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << (v[i] ? '1' : '0');
      out << ']';
    }
    out << '\n';
  };
  flags("shapes", rep.shapes_ok, rep.shapes_pass());
  flags("adjacency", rep.adjacency_ok, rep.adjacency_pass());
  flags("densification", rep.densification_ok, rep.densification_pass());
  out << "full density: " << (rep.full_density_ok ? "ok" : "FAIL") << '\n';
  for (const auto& m : rep.messages) out << "  " << m << '\n';
  out << (rep.valid() ? "valid" : "invalid") << '\n';
}

void print_cost(std::ostream& out, const CostEstimate& c) {
  out << "factors: " << c.num_factors << '\n'
      << "max factor nonzeros: " << c.max_factor_nonzeros << '\n'
      << "debut MACs per column: " << c.debut_macs_per_column << '\n'
      << "GEMM MACs per column: " << c.gemm_macs_per_column << '\n'
      << "columns: " << c.num_columns << '\n'
      << "debut MACs total: " << c.debut_macs_total() << '\n'
      << "GEMM MACs total: " << c.gemm_macs_total() << '\n'
      << "MAC ratio: " << std::setprecision(6) << c.mac_ratio() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deformable butterfly chains: validation, materialization, fitting and benchmarks", "debut"};
  app.require_subcommand(1);

  std::string chain_path;
  std::string out_path;
  std::string in_path;
  std::string format = "bin";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool grid = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check a chain file");
  validate_cmd->add_option("chain", chain_path)->required();

  auto* info_cmd = app.add_subcommand("info", "Nonzeros, compression and MAC counts");
  std::string conv_text, manifest_path, layer;
  info_cmd->add_option("chain", chain_path)->required();
  info_cmd->add_option("--conv", conv_text, "c_i,c_o,k,stride,pad,H,W");
  auto* manifest_opt = info_cmd->add_option("--manifest", manifest_path);
  info_cmd->add_option("--layer", layer)->needs(manifest_opt);

  auto* bipolar_cmd = app.add_subcommand("bipolar", "Random +-1 values, check the product is all +-1");
  bipolar_cmd->add_option("chain", chain_path)->required();
  bipolar_cmd->add_option("--seed", seed);
  bipolar_cmd->add_flag("--grid", grid, "Print the sign pattern");

  ValueSource source;
  auto* mat_cmd = app.add_subcommand("materialize", "Write the dense product of a chain");
  mat_cmd->add_option("chain", chain_path)->required();
  mat_cmd->add_option("-o,--output", out_path)->required();
  mat_cmd->add_option("--format", format)->check(CLI::IsMember({"bin", "csv"}));
  mat_cmd->add_flag("--grid", grid, "Print the sign pattern");
  source.add_to(*mat_cmd);

  auto* apply_cmd = app.add_subcommand("apply", "Y = chain * X");
  apply_cmd->add_option("chain", chain_path)->required();
  apply_cmd->add_option("-i,--input", in_path)->required();
  apply_cmd->add_option("-o,--output", out_path)->required();
  apply_cmd->add_option("--format", format)->check(CLI::IsMember({"bin", "csv"}));
  apply_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);
  source.add_to(*apply_cmd);

  auto* fit_cmd = app.add_subcommand("fit", "Fit a chain to a dense target by alternating least squares");
  std::string target_path;
  AlsOptions als;
  int sweeps = 0;
  fit_cmd->add_option("target", target_path)->required();
  fit_cmd->add_option("chain", chain_path)->required();
  fit_cmd->add_option("-o,--output", out_path, "Output directory")->required();
  fit_cmd->add_option("--sweeps", sweeps)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tol", als.rel_tol);
  fit_cmd->add_option("--ridge", als.ridge)->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--seed", als.seed);

  auto* conv_cmd = app.add_subcommand("conv", "Convolution with the flattened kernel replaced by a chain");
  std::string bias_path;
  conv_cmd->add_option("chain", chain_path)->required();
  conv_cmd->add_option("--conv", conv_text, "c_i,c_o,k,stride,pad,H,W")->required();
  conv_cmd->add_option("-i,--input", in_path)->required();
  conv_cmd->add_option("-o,--output", out_path)->required();
  conv_cmd->add_option("--bias", bias_path, "Matrix file holding c_o bias values");
  conv_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);
  source.add_to(*conv_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "Time chain_apply against the dense product");
  std::size_t cols = 256;
  int reps = 5;
  bench_cmd->add_option("chain", chain_path)->required();
  bench_cmd->add_option("--cols", cols)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--reps", reps)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed);
  bench_cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);

  auto* gen_cmd = app.add_subcommand("generate", "Propose chains for given boundary dims");
  std::size_t rows_out = 0, cols_in = 0;
  std::string style = "monotonic";
  GeneratorOptions gen;
  gen_cmd->add_option("rows", rows_out)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("cols", cols_in)->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--style", style)->check(CLI::IsMember({"monotonic", "bulging"}));
  gen_cmd->add_option("--max-factors", gen.max_factors)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-bulge-ratio", gen.max_bulge_ratio)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--max-candidates", gen.max_candidates)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (validate_cmd->parsed()) {
      const ValidationReport rep = validate(parse_chain_unchecked(read_text_file(chain_path)));
      print_report(out, rep);
      return rep.valid() ? kOk : kFail;
    }

    if (info_cmd->parsed()) {
      const ChainSpec spec = read_chain_file(chain_path);
      std::optional<ConvShape> conv;
      if (!conv_text.empty()) conv = parse_conv(conv_text);
      out << "chain: " << format_chain(spec) << '\n'
          << "shape: " << spec.rows_out() << " x " << spec.cols_in() << '\n'
          << "nonzeros: " << spec.total_nonzeros() << '\n'
          << "LC: " << percent(layer_compression(spec)) << '\n';
      if (!manifest_path.empty()) {
        if (layer.empty()) throw ParseError("--manifest needs --layer");
        const ModelManifest manifest = read_manifest_file(manifest_path);
        const ModelCompression mc = model_compression(manifest, {{layer, spec}});
        out << "MC: " << percent(mc.ratio) << '\n'
            << "params: " << mc.remaining_params << '\n'
            << "total params: " << mc.total_params << '\n';
      }
      print_cost(out, estimate_cost(spec, conv));
      return kOk;
    }

    if (bipolar_cmd->parsed()) {
      const ChainSpec spec = read_chain_file(chain_path);
      const BipolarReport rep = bipolar_test(spec, seed);
      out << "entries: " << rep.total_entries << '\n'
          << "zero: " << rep.zero_entries << '\n'
          << "non-bipolar: " << rep.non_bipolar_entries << '\n'
          << (rep.pass ? "pass" : "fail") << '\n';
      if (grid) out << sign_grid(materialize(random_chain(spec, InitScheme::bipolar(), seed)));
      return rep.pass ? kOk : kFail;
    }

    if (mat_cmd->parsed()) {
      const DenseMatrix m = materialize(source.bind(read_chain_file(chain_path)));
      write_matrix_as(out_path, m, format);
      out << "wrote " << m.rows() << " x " << m.cols() << " to " << out_path << '\n';
      if (grid) out << sign_grid(m);
      return kOk;
    }

    if (apply_cmd->parsed()) {
      const DebutChain c = source.bind(read_chain_file(chain_path));
      const DenseMatrix y = chain_apply(c, read_matrix_any(in_path), {.threads = threads});
      write_matrix_as(out_path, y, format);
      out << "wrote " << y.rows() << " x " << y.cols() << " to " << out_path << '\n';
      return kOk;
    }

    if (fit_cmd->parsed()) {
      const DenseMatrix target = read_matrix_any(target_path);
      const ChainSpec spec = read_chain_file(chain_path);
      if (sweeps > 0) als.max_sweeps = sweeps;
      const AlsResult res = als_fit(target, spec, als);
      for (const auto& w : res.warnings) err << "warning: " << w << '\n';
      write_chain_dir(out_path, res.chain);
      write_error_history(fs::path(out_path) / "errors.csv", res.initial_error, res.error_history);
      out << "sweeps: " << res.sweeps_run << (res.converged ? " (converged)" : "") << '\n'
          << "final relative error: " << std::setprecision(6) << res.final_error() << '\n';
      return kOk;
    }

    if (conv_cmd->parsed()) {
      const ConvShape shape = parse_conv(conv_text);
      const DebutChain c = source.bind(read_chain_file(chain_path));
      const Tensor3 x = read_tensor_file(in_path);
      std::vector<double> bias;
      if (!bias_path.empty()) {
        const DenseMatrix b = read_matrix_any(bias_path);
        bias.assign(b.values().begin(), b.values().end());
      }
      const Tensor3 y = bias_path.empty()
                            ? conv_via_chain(c, x, shape, std::nullopt, {.threads = threads})
                            : conv_via_chain(c, x, shape, std::span<const double>(bias), {.threads = threads});
      write_tensor_file(out_path, y);
      out << "wrote " << y.channels() << " x " << y.height() << " x " << y.width() << " to " << out_path << '\n';
      return kOk;
    }

    if (bench_cmd->parsed()) {
      using clock = std::chrono::steady_clock;
      const ChainSpec spec = read_chain_file(chain_path);
      const DebutChain c = random_chain(spec, InitScheme::gaussian(1.0), seed);
      const DenseMatrix f = materialize(c);
      DenseMatrix x(spec.cols_in(), cols);
      Xoshiro256 rng(mix_seed(seed, 0xbe9c));
      for (double& v : x.data()) v = rng.gaussian();

      MacCounter chain_macs, dense_macs;
      auto t0 = clock::now();
      for (int i = 0; i < reps; ++i) chain_apply(c, x, {.threads = threads, .counter = i == 0 ? &chain_macs : nullptr});
      const double chain_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count() / reps;
      t0 = clock::now();
      for (int i = 0; i < reps; ++i) dense_multiply(f, x, i == 0 ? &dense_macs : nullptr);
      const double dense_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count() / reps;

      out << "columns: " << cols << ", repetitions: " << reps << '\n'
          << "chain: " << chain_macs.macs << " MACs, " << std::setprecision(4) << chain_ms << " ms\n"
          << "dense: " << dense_macs.macs << " MACs, " << dense_ms << " ms\n"
          << "MAC ratio: " << std::setprecision(6)
          << static_cast<double>(chain_macs.macs) / static_cast<double>(dense_macs.macs) << '\n';
      return kOk;
    }

    if (gen_cmd->parsed()) {
      const auto chains = generate_chains(rows_out, cols_in, parse_style(style), gen);
      for (const auto& c : chains)
        out << format_chain(c) << "  # nonzeros " << c.total_nonzeros() << ", LC " << percent(layer_compression(c))
            << '\n';
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFail;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace debut
