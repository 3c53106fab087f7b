#include "forge/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "forge/errors.hpp"

namespace forge {

namespace {

// Splits the next non-blank, non-comment line into integer fields.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<long long>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      fields.clear();
      std::size_t i = 0;
      bool any = false;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        long long value = 0;
        auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, value);
        if (ec != std::errc() || ptr != line.data() + j) {
          throw ParseError(line_no_, "malformed field '" + line.substr(i, j - i) + "'");
        }
        fields.push_back(value);
        any = true;
        i = j;
      }
      if (any) return true;
    }
    return false;
  }

  std::size_t line() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

Graph read_graph(std::istream& in) {
  LineReader reader(in);
  std::vector<long long> f;
  if (!reader.next(f)) throw ParseError(reader.line(), "missing header 'n m'");
  if (f.size() != 2 || f[0] < 0 || f[1] < 0 || f[0] > (1LL << 30)) {
    throw ParseError(reader.line(), "header must be 'n m' with non-negative integers");
  }
  const int n = static_cast<int>(f[0]);
  const long long m = f[1];
  std::vector<Edge> edges;
  std::vector<std::size_t> lines;
  while (reader.next(f)) {
    if (f.size() != 2) throw ParseError(reader.line(), "edge line must be 'u v'");
    if (f[0] == f[1]) throw ParseError(reader.line(), "loop at vertex " + std::to_string(f[0]));
    if (f[0] < 0 || f[1] < 0 || f[0] >= n || f[1] >= n) {
      throw ParseError(reader.line(), "vertex out of range (n = " + std::to_string(n) + ")");
    }
    if (f[0] > f[1]) throw ParseError(reader.line(), "edge must be written with u < v");
    edges.push_back({static_cast<Vertex>(f[0]), static_cast<Vertex>(f[1])});
    lines.push_back(reader.line());
  }
  if (static_cast<long long>(edges.size()) != m) {
    throw ParseError(reader.line(), "header declares " + std::to_string(m) + " edges, found " +
                                        std::to_string(edges.size()));
  }
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return edges[a] != edges[b] ? edges[a] < edges[b] : a < b;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (edges[order[i]] == edges[order[i - 1]]) {
      throw ParseError(lines[order[i]], "duplicate edge " + std::to_string(edges[order[i]].u) + " " +
                                            std::to_string(edges[order[i]].v));
    }
  }
  return Graph::from_edges(n, edges);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.size() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Coloring read_coloring(std::istream& in, const Graph& host) {
  LineReader reader(in);
  std::vector<long long> f;
  if (!reader.next(f)) throw ParseError(reader.line(), "missing header 's'");
  if (f.size() != 1 || f[0] < 1 || f[0] > 1000000) throw ParseError(reader.line(), "header must be a positive color count 's'");
  Coloring coloring;
  coloring.s = static_cast<int>(f[0]);
  coloring.colors.assign(host.size(), -1);
  while (reader.next(f)) {
    if (f.size() != 3) throw ParseError(reader.line(), "coloring line must be 'u v c'");
    if (f[0] < 0 || f[1] < 0 || f[0] >= host.order() || f[1] >= host.order()) {
      throw ParseError(reader.line(), "vertex out of range");
    }
    auto idx = host.edge_index(static_cast<Vertex>(f[0]), static_cast<Vertex>(f[1]));
    if (!idx) throw ParseError(reader.line(), "pair is not an edge of the host graph");
    if (f[2] < 0 || f[2] >= coloring.s) throw ParseError(reader.line(), "color out of range [0, s)");
    if (coloring.colors[*idx] != -1) throw ParseError(reader.line(), "edge colored twice");
    coloring.colors[*idx] = static_cast<int>(f[2]);
  }
  for (std::size_t i = 0; i < coloring.colors.size(); ++i) {
    if (coloring.colors[i] == -1) {
      const Edge& e = host.edges()[i];
      throw ParseError(reader.line(), "coloring is not total: missing color for edge " + std::to_string(e.u) + " " +
                                          std::to_string(e.v));
    }
  }
  return coloring;
}

void write_coloring(std::ostream& out, const Graph& host, const Coloring& coloring) {
  out << coloring.s << '\n';
  for (std::size_t i = 0; i < host.size(); ++i) {
    const Edge& e = host.edges()[i];
    out << e.u << ' ' << e.v << ' ' << coloring.colors[i] << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Graph read_graph_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_graph(in);
}

Coloring read_coloring_file(const std::string& path, const Graph& host) {
  std::istringstream in(read_file(path));
  return read_coloring(in, host);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace forge

namespace forge {

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u, e.v});
  return {{"n", g.order()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError(0, "graph edge must be a pair");
      edges.push_back(make_edge(e[0].get<Vertex>(), e[1].get<Vertex>()));
    }
    return Graph::from_edges(n, edges);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(0, std::string("bad graph json: ") + ex.what());
  }
}

nlohmann::json coloring_to_json(const Coloring& c) { return {{"s", c.s}, {"colors", c.colors}}; }

Coloring coloring_from_json(const nlohmann::json& j, const Graph& host) {
  Coloring c;
  try {
    c.s = j.at("s").get<int>();
    c.colors = j.at("colors").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(0, std::string("bad coloring json: ") + ex.what());
  }
  if (c.s < 1) throw ParseError(0, "coloring needs s >= 1");
  if (c.colors.size() != host.size()) throw ParseError(0, "coloring length does not match host edge count");
  for (int x : c.colors)
    if (x < 0 || x >= c.s) throw ParseError(0, "color out of range [0, s)");
  return c;
}

}  // namespace forge
