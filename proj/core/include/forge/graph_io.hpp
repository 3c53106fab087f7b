#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "forge/graph.hpp"

namespace forge {

// Graph file:    first line "n m", then m lines "u v" with 0 <= u < v < n.
// Coloring file: first line "s", then one line "u v c" per host edge with
//                0 <= c < s.
// '#' starts a comment; blank lines are ignored. Errors are ParseError with
// the offending 1-based line number.

Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

Coloring read_coloring(std::istream& in, const Graph& host);
void write_coloring(std::ostream& out, const Graph& host, const Coloring& coloring);

Graph read_graph_file(const std::string& path);
Coloring read_coloring_file(const std::string& path, const Graph& host);

/// Write via a temporary sibling file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// {"n": order, "edges": [[u, v], ...]} in edge order.
nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);
/// {"s": colours, "colors": [...]} aligned with the host edge order.
nlohmann::json coloring_to_json(const Coloring& c);
Coloring coloring_from_json(const nlohmann::json& j, const Graph& host);

/// FNV-1a 64-bit digest, hex-encoded. Used to pin certificate inputs.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace forge
