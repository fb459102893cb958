#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "recon/errors.hpp"
#include "recon/signed_graph.hpp"

namespace recon {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_uint(std::string_view tok) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open file for writing");
  return out;
}

/// printf-style "%.6g".
inline std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// Edge-list format: `u v s` per line, s in {+1, -1, 1}; `#` lines are
/// comments, except `# nodes: N` which fixes the node count (otherwise max
/// id + 1). Parallel edges are an error.
inline SignedGraph read_edge_list(std::istream& in, const std::string& source = "<edge-list>") {
  std::vector<Edge> edges;
  std::optional<std::size_t> declared_nodes;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::size_t max_id_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      auto body = detail::trim(text.substr(1));
      constexpr std::string_view tag = "nodes:";
      if (body.substr(0, tag.size()) == tag) {
        auto n = detail::parse_uint<std::size_t>(detail::trim(body.substr(tag.size())));
        if (!n) throw ParseError(source, line_no, "bad '# nodes:' header");
        declared_nodes = *n;
      }
      continue;
    }
    auto tok = detail::split_ws(text);
    if (tok.size() != 3) throw ParseError(source, line_no, "expected 'u v sign'");
    auto u = detail::parse_uint<NodeId>(tok[0]);
    auto v = detail::parse_uint<NodeId>(tok[1]);
    if (!u || !v) throw ParseError(source, line_no, "node ids must be non-negative integers");
    int sign = 0;
    if (tok[2] == "+1" || tok[2] == "1") {
      sign = 1;
    } else if (tok[2] == "-1") {
      sign = -1;
    } else {
      throw ParseError(source, line_no, "sign must be +1, -1 or 1, got '" +
                                            std::string(tok[2]) + "'");
    }
    if (*u == *v) throw ParseError(source, line_no, "self-loop on node " + std::to_string(*u));
    const NodeId lo = std::min(*u, *v);
    const NodeId hi = std::max(*u, *v);
    const auto key = (static_cast<std::uint64_t>(lo) << 32) | hi;
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ParseError(source, line_no,
                       "parallel edge (" + std::to_string(lo) + ", " + std::to_string(hi) +
                           "), first seen on line " + std::to_string(it->second));
    }
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::size_t{hi} + 1);
    edges.push_back({lo, hi, sign});
  }
  std::size_t n = max_id_plus_one;
  if (declared_nodes) {
    if (*declared_nodes < max_id_plus_one) {
      throw ParseError(source, 0, "header declares " + std::to_string(*declared_nodes) +
                                      " nodes but ids reach " +
                                      std::to_string(max_id_plus_one - 1));
    }
    n = *declared_nodes;
  }
  return SignedGraph(n, std::move(edges));
}

inline SignedGraph read_edge_list(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  return read_edge_list(in, path.string());
}

inline void write_edge_list(std::ostream& out, const SignedGraph& g) {
  out << "# nodes: " << g.num_nodes() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << (e.sign > 0 ? "1" : "-1") << '\n';
}

inline void write_edge_list(const std::filesystem::path& path, const SignedGraph& g) {
  auto out = detail::open_out(path);
  write_edge_list(out, g);
}

/// Partition format: `node community` per line. Every node in
/// [0, expected_nodes) must appear exactly once; K = max community + 1.
inline Partition read_partition(std::istream& in, std::size_t expected_nodes,
                                const std::string& source = "<partition>") {
  constexpr CommunityId unset = ~CommunityId{0};
  std::vector<CommunityId> labels(expected_nodes, unset);
  std::vector<std::size_t> first_line(expected_nodes, 0);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto tok = detail::split_ws(text);
    if (tok.size() != 2) throw ParseError(source, line_no, "expected 'node community'");
    auto v = detail::parse_uint<NodeId>(tok[0]);
    auto c = detail::parse_uint<CommunityId>(tok[1]);
    if (!v || !c || *c == unset) {
      throw ParseError(source, line_no, "node and community must be non-negative integers");
    }
    if (*v >= expected_nodes) {
      throw ParseError(source, line_no, "node " + std::to_string(*v) + " out of range [0, " +
                                            std::to_string(expected_nodes) + ")");
    }
    if (labels[*v] != unset) {
      throw ParseError(source, line_no, "duplicate node " + std::to_string(*v) +
                                            " (first on line " +
                                            std::to_string(first_line[*v]) + ")");
    }
    labels[*v] = *c;
    first_line[*v] = line_no;
  }
  for (std::size_t v = 0; v < expected_nodes; ++v) {
    if (labels[v] == unset) throw ParseError(source, 0, "missing node " + std::to_string(v));
  }
  if (expected_nodes == 0) return Partition({}, 1);
  return Partition::from_labels(std::move(labels));
}

inline Partition import_partition(const std::filesystem::path& path, std::size_t expected_nodes) {
  auto in = detail::open_in(path);
  return read_partition(in, expected_nodes, path.string());
}

inline void write_partition(std::ostream& out, const Partition& p) {
  for (std::size_t v = 0; v < p.size(); ++v) out << v << ' ' << p[v] << '\n';
}

inline void write_partition(const std::filesystem::path& path, const Partition& p) {
  auto out = detail::open_out(path);
  write_partition(out, p);
}

/// `u v flag` per edge, flag in {0, 1}.
inline void write_noise_flags(std::ostream& out, const SignedGraph& g,
                              const std::vector<bool>& flags) {
  if (flags.size() != g.num_edges()) throw InvalidArgument("noise flag count != edge count");
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    out << g.edges()[e].u << ' ' << g.edges()[e].v << ' ' << (flags[e] ? 1 : 0) << '\n';
  }
}

inline void write_noise_flags(const std::filesystem::path& path, const SignedGraph& g,
                              const std::vector<bool>& flags) {
  auto out = detail::open_out(path);
  write_noise_flags(out, g, flags);
}

/// Reads a noise-flag file and aligns it with g's edge order.
inline std::vector<bool> read_noise_flags(std::istream& in, const SignedGraph& g,
                                          const std::string& source = "<noise-flags>") {
  std::vector<int> flags(g.num_edges(), -1);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto tok = detail::split_ws(text);
    if (tok.size() != 3) throw ParseError(source, line_no, "expected 'u v flag'");
    auto u = detail::parse_uint<NodeId>(tok[0]);
    auto v = detail::parse_uint<NodeId>(tok[1]);
    auto f = detail::parse_uint<int>(tok[2]);
    if (!u || !v || !f || *f > 1) throw ParseError(source, line_no, "malformed flag line");
    if (*u >= g.num_nodes() || *v >= g.num_nodes()) {
      throw ParseError(source, line_no, "node id out of range");
    }
    auto e = g.find_edge(*u, *v);
    if (!e) throw ParseError(source, line_no, "flag for an edge not in the graph");
    flags[*e] = *f;
  }
  std::vector<bool> out(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (flags[e] < 0) {
      throw ParseError(source, 0, "no flag for edge (" + std::to_string(g.edges()[e].u) + ", " +
                                      std::to_string(g.edges()[e].v) + ")");
    }
    out[e] = flags[e] == 1;
  }
  return out;
}

inline std::vector<bool> read_noise_flags(const std::filesystem::path& path, const SignedGraph& g) {
  auto in = detail::open_in(path);
  return read_noise_flags(in, g, path.string());
}

/// CSV with header `node,z0,...,z{d-1}`; values printed with 17 significant
/// digits so the file round-trips.
inline void write_embeddings_csv(std::ostream& out, const Eigen::MatrixXd& z) {
  out << "node";
  for (Eigen::Index j = 0; j < z.cols(); ++j) out << ",z" << j;
  out << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", z(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

inline void write_embeddings_csv(const std::filesystem::path& path, const Eigen::MatrixXd& z) {
  auto out = detail::open_out(path);
  write_embeddings_csv(out, z);
}

}  // namespace recon
