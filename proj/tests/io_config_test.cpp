#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace recon {
namespace {

namespace fs = std::filesystem;

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_edge_list(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 9999;
}

TEST(EdgeList, ParsesSignsCommentsAndHeader) {
  std::istringstream in("# a comment\n# nodes: 6\n0 1 +1\n1 2 -1\n\n3 2 1\n");
  const auto g = read_edge_list(in);
  EXPECT_EQ(g.num_nodes(), 6u);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.sign(0, 1), 1);
  EXPECT_EQ(g.sign(2, 1), -1);
  EXPECT_EQ(g.sign(2, 3), 1);
}

TEST(EdgeList, SizeIsMaxIdPlusOneWithoutHeader) {
  std::istringstream in("0 4 -1\n");
  EXPECT_EQ(read_edge_list(in).num_nodes(), 5u);
}

TEST(EdgeList, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("0 1 1\n1 0 -1\n"), 2u);  // parallel edge
  EXPECT_EQ(parse_error_line("0 1 1\n# x\n2 2 1\n"), 3u);  // self-loop
  EXPECT_EQ(parse_error_line("0 1 2\n"), 1u);             // bad sign
  EXPECT_EQ(parse_error_line("0 -1 1\n"), 1u);            // negative id
  EXPECT_EQ(parse_error_line("0 1\n"), 1u);               // too few fields
  EXPECT_EQ(parse_error_line("# nodes: 2\n0 5 1\n"), 0u);  // header too small
}

TEST(EdgeList, ErrorMessageNamesSource) {
  const auto path = fs::temp_directory_path() / "recon_bad.edges";
  std::ofstream(path) << "0 1 1\n0 1 1\n";
  try {
    read_edge_list(path);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string() + ":2:"), std::string::npos) << e.what();
  }
  fs::remove(path);
  EXPECT_THROW(read_edge_list(fs::path("/nonexistent/recon.edges")), ParseError);
}

TEST(EdgeList, HeaderPreservesIsolatedTail) {
  const auto s = generate_ssbm({50, 2, 0.0, 0.0, 0});
  std::stringstream buf;
  write_edge_list(buf, s.graph);
  EXPECT_EQ(read_edge_list(buf).num_nodes(), 50u);
}

TEST(NoiseFlags, RoundTrip) {
  const auto s = generate_ssbm({80, 2, 0.1, 0.3, 1});
  std::stringstream buf;
  write_noise_flags(buf, s.graph, s.noise_flags);
  EXPECT_EQ(read_noise_flags(buf, s.graph), s.noise_flags);
}

TEST(NoiseFlags, MissingAndUnknownEdges) {
  const SignedGraph g(3, {{0, 1, 1}, {1, 2, -1}});
  std::istringstream missing("0 1 0\n");
  EXPECT_THROW(read_noise_flags(missing, g), ParseError);
  std::istringstream unknown("0 1 0\n1 2 1\n0 2 1\n");
  EXPECT_THROW(read_noise_flags(unknown, g), ParseError);
}

TEST(Embeddings, CsvRoundTripsAtFullPrecision) {
  Eigen::MatrixXd z(2, 2);
  z << 0.1, 1.0 / 3.0, -2e-17, 7.0;
  std::stringstream buf;
  write_embeddings_csv(buf, z);
  std::string header, line;
  std::getline(buf, header);
  EXPECT_EQ(header, "node,z0,z1");
  std::getline(buf, line);
  std::stringstream row(line);
  std::string cell;
  std::getline(row, cell, ',');
  EXPECT_EQ(cell, "0");
  std::getline(row, cell, ',');
  EXPECT_EQ(std::stod(cell), 0.1);
  std::getline(row, cell, ',');
  EXPECT_EQ(std::stod(cell), 1.0 / 3.0);
}

TEST(Fmt, SixSignificantDigits) {
  EXPECT_EQ(detail::fmt6(0.123456789), "0.123457");
  EXPECT_EQ(detail::fmt6(61.3), "61.3");
  EXPECT_EQ(detail::fmt6(0.0), "0");
}

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# sweep settings\n"
      "alpha = 0.7   # inline comment\n"
      "sr_mode=sample\n"
      "laplacian = plain\n"
      "convergence = fixed-rounds\n"
      "enable_br = false\n"
      "kmeans_init = forgy\n"
      "modularity = signed\n"
      "epochs = 12\n");
  const auto cfg = parse_config(in);
  EXPECT_DOUBLE_EQ(cfg.structural.alpha, 0.7);
  EXPECT_EQ(cfg.structural.mode, AssignMode::sample);
  EXPECT_EQ(cfg.spectral.laplacian, LaplacianVariant::plain);
  EXPECT_EQ(cfg.convergence, Convergence::fixed_rounds);
  EXPECT_FALSE(cfg.enable_br);
  EXPECT_EQ(cfg.kmeans.init, KmeansInit::forgy);
  EXPECT_EQ(cfg.modularity, ModularityVariant::signed_difference);
  EXPECT_EQ(cfg.contrastive.epochs, 12u);
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_config(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{9999};
  };
  EXPECT_EQ(line_of("alpha = 0.5\nbogus = 1\n"), 2u);
  EXPECT_EQ(line_of("alpha = abc\n"), 1u);
  EXPECT_EQ(line_of("\n\nsr_mode = maybe\n"), 3u);
  EXPECT_EQ(line_of("epochs = -3\n"), 1u);
  EXPECT_EQ(line_of("no equals sign\n"), 1u);
}

TEST(Config, WriteThenParseRoundTrips) {
  RefineConfig cfg;
  cfg.structural.alpha = 0.37;
  cfg.contrastive.tau_n = 0.123456789012;
  cfg.boundary.purge_threshold = 0.25;
  cfg.max_rounds = 7;
  cfg.enable_cl = false;
  std::stringstream buf;
  write_config(buf, cfg);
  const auto back = parse_config(buf);
  EXPECT_EQ(back.structural.alpha, cfg.structural.alpha);
  EXPECT_EQ(back.contrastive.tau_n, cfg.contrastive.tau_n);
  EXPECT_EQ(back.boundary.purge_threshold, cfg.boundary.purge_threshold);
  EXPECT_EQ(back.max_rounds, 7u);
  EXPECT_FALSE(back.enable_cl);
}

TEST(Config, ApplySettingOverrides) {
  RefineConfig cfg;
  apply_setting(cfg, "purge_threshold=0.8");
  EXPECT_DOUBLE_EQ(cfg.boundary.purge_threshold, 0.8);
  EXPECT_THROW(apply_setting(cfg, "nope=1"), InvalidArgument);
}

}  // namespace
}  // namespace recon
