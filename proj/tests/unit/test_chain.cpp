#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "debut/chain.hpp"
#include "debut/error.hpp"
#include "debut/io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace debut;
using debut::testing::fixture;
using debut::testing::fixture_chains;

namespace {

double round2(double percent) { return std::round(percent * 100.0) / 100.0; }

ModelManifest lenet() { return read_manifest_file(std::string(DEBUT_DATA_DIR) + "/manifests/lenet.manifest"); }
ModelManifest vgg() { return read_manifest_file(std::string(DEBUT_DATA_DIR) + "/manifests/vgg16bn.manifest"); }

}  // namespace

TEST(ChainParseTest, ArrowFormMapsLeftmostLast) {
  const ChainSpec spec = parse_chain("16 <-(2,2,8)- 16 <-(2,2,4)- 16 <-(2,2,2)- 16 <-(2,2,1)- 16");
  ASSERT_EQ(spec.size(), 4u);
  EXPECT_EQ(spec.factors[0], (FactorShape{16, 16, 2, 2, 1}));
  EXPECT_EQ(spec.factors[3], (FactorShape{16, 16, 2, 2, 8}));
  EXPECT_EQ(spec.total_nonzeros(), 128u);
  for (const auto& f : spec.factors) EXPECT_EQ(nonzero_count(f), 32u);
}

TEST(ChainParseTest, LineFormMatchesArrowForm) {
  const ChainSpec lines = parse_chain("# comment\n16 16 2 2 8\n\n16 16 2 2 4\n16 16 2 2 2  # trailing\n16 16 2 2 1\n");
  EXPECT_EQ(lines, parse_chain(fixture("butterfly16").text));
}

TEST(ChainParseTest, FixtureRoundTrip) {
  for (const auto& c : fixture_chains()) {
    const ChainSpec spec = parse_chain(c.text);
    EXPECT_EQ(format_chain(spec), c.text) << c.name;
    EXPECT_EQ(parse_chain(format_chain(spec)), spec) << c.name;
  }
}

TEST(ChainParseTest, ToleratesWhitespaceAndComments) {
  EXPECT_EQ(parse_chain("  # header\n 16<-( 2 , 2 , 8 )-16 <-(2,2,4)- 16<-(2,2,2)-16 <-(2,2,1)-   16  # tail\n"),
            parse_chain(fixture("butterfly16").text));
}

TEST(ChainParseTest, MalformedTextIsParseError) {
  for (const char* bad : {"", "   # only a comment", "16 <-(2,2)- 16", "16 <-(2,2,8) 16", "16 <-(2,2,8)- x",
                          "16 <-(2,2,8)- 16 extra", "16 16 2 2", "16 16 2 2 1 9", "-16 16 2 2 1"}) {
    EXPECT_THROW(parse_chain_unchecked(bad), ParseError) << '"' << bad << '"';
  }
}

TEST(ChainParseTest, ParseErrorNamesColumn) {
  try {
    parse_chain_unchecked("16 <-(2,x,8)- 16");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
}

TEST(ChainParseTest, BrokenJunctionIsAdjacencyError) {
  const char* text = "16 16 2 2 4\n16 16 2 2 2\n32 32 2 2 1\n";
  EXPECT_NO_THROW(parse_chain_unchecked(text));
  try {
    parse_chain(text);
    FAIL();
  } catch (const AdjacencyError& e) {
    EXPECT_NE(std::string(e.what()).find("junction"), std::string::npos);
  }
}

TEST(ChainValidateTest, AllFixturesAreValid) {
  for (const auto& c : fixture_chains()) {
    const ValidationReport rep = validate(parse_chain(c.text));
    EXPECT_TRUE(rep.valid()) << c.name;
    EXPECT_TRUE(rep.messages.empty()) << c.name;
  }
}

TEST(ChainValidateTest, ReportsEachGroup) {
  // t of the rightmost factor must be 1
  ChainSpec spec = parse_chain("16 <-(2,2,8)- 16 <-(2,2,4)- 16 <-(2,2,2)- 16 <-(2,2,2)- 16");
  ValidationReport rep = validate(spec);
  EXPECT_TRUE(rep.shapes_pass());
  EXPECT_TRUE(rep.adjacency_pass());
  EXPECT_FALSE(rep.densification_pass());
  EXPECT_FALSE(rep.densification_ok[0]);
  EXPECT_TRUE(rep.densification_ok[1]);
  EXPECT_FALSE(rep.valid());

  // three factors of (2,2) only reach 8x8 blocks
  rep = validate(parse_chain("16 <-(2,2,4)- 16 <-(2,2,2)- 16 <-(2,2,1)- 16"));
  EXPECT_TRUE(rep.densification_pass());
  EXPECT_FALSE(rep.full_density_ok);

  spec = parse_chain_unchecked("16 16 2 2 4\n16 16 2 2 2\n32 32 2 2 1\n");
  rep = validate(spec);
  EXPECT_FALSE(rep.adjacency_pass());
  EXPECT_EQ(rep.adjacency_ok, (std::vector<bool>{false, true}));

  spec.factors[1] = {16, 16, 2, 3, 1};
  rep = validate(spec);
  EXPECT_FALSE(rep.shapes_pass());
  EXPECT_FALSE(rep.shapes_ok[1]);

  EXPECT_FALSE(validate(ChainSpec{}).valid());
}

TEST(ChainValidateTest, SingleDenseFactor) {
  const ChainSpec spec{{{12, 20, 12, 20, 1}}};
  EXPECT_TRUE(validate(spec).valid());
  EXPECT_NEAR(layer_compression(spec), 0.0, 1e-15);
}

TEST(ChainValidateTest, HugeProductsSaturate) {
  ChainSpec spec;
  std::size_t q = 1;
  for (int i = 0; i < 70; ++i) {
    spec.factors.push_back({q * 2, q * 2, 2, 2, q});
    q *= 2;
    if (q > (std::size_t{1} << 40)) break;
  }
  EXPECT_NO_THROW(validate(spec));
}

TEST(ChainPartialProductsTest, ButterflyDensifiesByDoubling) {
  const auto pp = partial_products(parse_chain(fixture("butterfly16").text));
  ASSERT_EQ(pp.size(), 4u);
  std::size_t b = 2;
  for (const auto& p : pp) {
    EXPECT_EQ(p.rows, 16u);
    EXPECT_EQ(p.cols, 16u);
    EXPECT_EQ(p.block_rows, b);
    EXPECT_EQ(p.block_cols, b);
    EXPECT_EQ(p.t, 1u);
    b *= 2;
  }
}

TEST(ChainPartialProductsTest, NonDensifyingChainThrows) {
  EXPECT_THROW(partial_products(parse_chain("16 <-(2,2,2)- 16 <-(2,2,4)- 16 <-(2,2,8)- 16 <-(2,2,1)- 16")),
               DensificationError);
}

TEST(ChainMetricsTest, LayerCompressionMatchesPublishedTables) {
  for (const auto& c : fixture_chains()) {
    const ChainSpec spec = parse_chain(c.text);
    EXPECT_DOUBLE_EQ(round2(layer_compression(spec) * 100.0), c.lc_percent) << c.name;
    if (c.nonzeros) EXPECT_EQ(spec.total_nonzeros(), *c.nonzeros) << c.name;
  }
}

TEST(ChainMetricsTest, IdentityChainCompression) {
  const ChainSpec spec{{{40, 40, 1, 1, 1}}};
  EXPECT_DOUBLE_EQ(layer_compression(spec), 1.0 - 1.0 / 40.0);
}

TEST(ChainMetricsTest, LenetManifestTotals) {
  const ModelManifest m = lenet();
  EXPECT_EQ(m.total_params(), 61482u);
  ASSERT_NE(m.find("fc1"), nullptr);
  EXPECT_EQ(m.find("fc1")->weight_params(), 51200u);
  EXPECT_EQ(m.find("nope"), nullptr);
}

TEST(ChainMetricsTest, LenetModelCompression) {
  const ModelManifest m = lenet();
  const ChainSpec fc1 = parse_chain(fixture("lenet_fc1_mono_b").text);
  ModelCompression mc = model_compression(m, {{"fc1", fc1}});
  EXPECT_DOUBLE_EQ(round2(mc.ratio * 100.0), 70.78);
  EXPECT_EQ(mc.remaining_params, 17962);
  EXPECT_EQ(mc.saved_params, 51200 - 7680);

  mc = model_compression(m, {{"fc1", fc1},
                             {"fc2", parse_chain(fixture("lenet_fc2").text)},
                             {"conv2", parse_chain(fixture("lenet_conv2_bulge_c").text)}});
  EXPECT_DOUBLE_EQ(round2(mc.ratio * 100.0), 83.43);
  EXPECT_EQ(mc.remaining_params, 10186);
}

TEST(ChainMetricsTest, VggModelCompression) {
  const ModelManifest m = vgg();
  std::map<std::string, ChainSpec> repl{{"conv8", parse_chain(fixture("vgg_conv8_mono").text)}};
  for (int i = 9; i <= 13; ++i) repl["conv" + std::to_string(i)] = parse_chain(fixture("vgg_conv13_mono_c").text);
  const ModelCompression mc = model_compression(m, repl);
  EXPECT_NEAR(mc.ratio * 100.0, 83.77, 0.05);

  const ModelCompression single =
      model_compression(m, {{"conv13", parse_chain(fixture("vgg_conv13_mono_c").text)}});
  EXPECT_DOUBLE_EQ(round2(single.ratio * 100.0), 15.23);
}

TEST(ChainMetricsTest, ModelCompressionErrors) {
  const ModelManifest m = lenet();
  const ChainSpec fc1 = parse_chain(fixture("lenet_fc1_mono_b").text);
  EXPECT_THROW(model_compression(m, {{"fc9", fc1}}), UnknownLayer);
  EXPECT_THROW(model_compression(m, {{"fc2", fc1}}), ShapeMismatch);
}

TEST(ChainMetricsTest, ManifestParsing) {
  const ModelManifest m = parse_manifest("# c\na 1 2 3 2 0\nmodel_extra 7\nb 2 2 1 0 4\n");
  EXPECT_EQ(m.layers.size(), 2u);
  EXPECT_EQ(m.model_extra, 7u);
  EXPECT_EQ(m.total_params(), 18u + 2u + 4u + 4u + 7u);
  EXPECT_THROW(parse_manifest("a 1 2 3"), ParseError);
  EXPECT_THROW(parse_manifest("a 1 2 3 0 0\na 1 2 3 0 0"), ParseError);
  EXPECT_THROW(parse_manifest("a 1 2 3 0 0 9"), ParseError);
}

TEST(ChainCostTest, MacsFollowNonzeros) {
  const ChainSpec spec = parse_chain(fixture("vgg_conv13_mono_c").text);
  CostEstimate c = estimate_cost(spec);
  EXPECT_EQ(c.debut_macs_per_column, 75776u);
  EXPECT_EQ(c.gemm_macs_per_column, 2359296u);
  EXPECT_EQ(c.num_factors, 7u);
  EXPECT_EQ(c.max_factor_nonzeros, 4608u * 8u);
  EXPECT_NEAR(c.mac_ratio(), 75776.0 / 2359296.0, 1e-15);

  c = estimate_cost(spec, ConvShape{512, 512, 3, 1, 1, 2, 2});
  EXPECT_EQ(c.num_columns, 4u);
  EXPECT_EQ(c.debut_macs_total(), 4u * 75776u);
  EXPECT_THROW(estimate_cost(spec, ConvShape{256, 512, 3, 1, 1, 2, 2}), ShapeMismatch);
}

TEST(DebutChainTest, SetFactorChecksIndexAndShape) {
  const ChainSpec spec = parse_chain(fixture("butterfly16").text);
  DebutChain c = random_chain(spec, InitScheme::bipolar(), 0);
  EXPECT_THROW(c.set_factor(4, c.factor(0)), IndexError);
  EXPECT_THROW(c.set_factor(0, DebutFactor({16, 16, 4, 4, 1})), ShapeMismatch);
  const DebutFactor zeros(c.factor(2).shape());
  c.set_factor(2, zeros);
  EXPECT_EQ(c.factor(2), zeros);
  EXPECT_THROW(DebutChain({DebutFactor({16, 16, 2, 2, 1}), DebutFactor({8, 8, 2, 2, 2})}), AdjacencyError);
  EXPECT_THROW(DebutChain(std::vector<DebutFactor>{}), AdjacencyError);
}

TEST(DebutChainTest, RandomChainIsDeterministic) {
  const ChainSpec spec = parse_chain(fixture("lenet_fc1_bulge_a").text);
  EXPECT_EQ(random_chain(spec, InitScheme::gaussian(1.0), 9), random_chain(spec, InitScheme::gaussian(1.0), 9));
  EXPECT_NE(random_chain(spec, InitScheme::gaussian(1.0), 9), random_chain(spec, InitScheme::gaussian(1.0), 10));
  const DebutChain c = random_chain(spec, InitScheme::bipolar(), 1);
  for (std::size_t i = 0; i < c.size(); ++i)
    EXPECT_EQ(c.factor(i), random_init(spec.factors[i], InitScheme::bipolar(), mix_seed(1, i)));
}

// Property: chains built from arbitrary r/s sequences with the implied dims and t
// always validate and have the expected nonzero count.
TEST(ChainPropertyTest, ConstructedChainsValidate) {
  Xoshiro256 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 5);
    std::vector<std::size_t> r(n), s(n);
    std::size_t rows = 1, cols = 1;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = 1 + static_cast<std::size_t>(rng.uniform() * 4);
      s[i] = 1 + static_cast<std::size_t>(rng.uniform() * 4);
      rows *= r[i];
      cols *= s[i];
    }
    ChainSpec spec;
    std::size_t q = cols, rp = 1, sp = 1, nnz = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = rp;
      rp *= r[i];
      sp *= s[i];
      // p_i = (r_0..r_i) * (s_{i+1}..s_{n-1})
      const std::size_t p = rp * (cols / sp);
      spec.factors.push_back({p, q, r[i], s[i], t});
      nnz += p * s[i];
      q = p;
    }
    const ValidationReport rep = validate(spec);
    ASSERT_TRUE(rep.valid()) << format_chain(spec);
    EXPECT_EQ(spec.rows_out(), rows);
    EXPECT_EQ(spec.total_nonzeros(), nnz);
    EXPECT_EQ(parse_chain(format_chain(spec)), spec);
  }
}
