#pragma once

// Small simple undirected graphs: construction, graph6 / edge-list I/O,
// brute-force canonical labeling, non-isomorphic enumeration and exhaustive
// coloring. Everything here targets small instances (n <= 10).

#include "qac/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qac {

using Edge = std::pair<int, int>;
using Coloring = std::vector<int>;

class Graph {
public:
  Graph() = default;

  /// Edges may be given in either orientation and may repeat; they are stored
  /// as sorted, unique (i<j) pairs. Self-loops and out-of-range endpoints throw.
  explicit Graph(int n_vertices, std::vector<Edge> edges = {}) : n_(n_vertices) {
    if (n_vertices < 0)
      throw std::invalid_argument("Graph: negative vertex count");
    for (auto& e : edges) {
      if (e.first == e.second)
        throw std::invalid_argument("Graph: self-loop at vertex " + std::to_string(e.first));
      if (e.first < 0 || e.second < 0 || e.first >= n_ || e.second >= n_)
        throw std::invalid_argument("Graph: edge endpoint out of range");
      if (e.first > e.second)
        std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
  }

  int n_vertices() const noexcept { return n_; }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool has_edge(int i, int j) const {
    if (i > j)
      std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
  }

  int degree(int v) const {
    int d = 0;
    for (const auto& [a, b] : edges_)
      d += (a == v) + (b == v);
    return d;
  }

  int max_degree() const {
    int d = 0;
    for (int v = 0; v < n_; ++v)
      d = std::max(d, degree(v));
    return d;
  }

  /// Row-major n*n 0/1 adjacency.
  std::vector<std::uint8_t> adjacency() const {
    std::vector<std::uint8_t> a(static_cast<std::size_t>(n_) * n_, 0);
    for (const auto& [i, j] : edges_) {
      a[i * n_ + j] = 1;
      a[j * n_ + i] = 1;
    }
    return a;
  }

  bool is_connected() const {
    if (n_ <= 1)
      return true;
    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x)
        x = parent[x] = parent[parent[x]];
      return x;
    };
    int components = n_;
    for (const auto& [i, j] : edges_) {
      int a = find(i), b = find(j);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    return components == 1;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

inline Graph make_complete(int n) {
  std::vector<Edge> e;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

inline Graph make_cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

inline Graph make_path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i)
    e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

// ---------------------------------------------------------------------------
// graph6

/// Decodes a graph6 string (optional ">>graph6<<" header, optional trailing
/// newline). Only the short form (n <= 62) is accepted.
inline Graph parse_graph6(std::string_view text) {
  constexpr std::string_view header = ">>graph6<<";
  std::size_t pos = 0;
  if (text.substr(0, header.size()) == header)
    pos = header.size();
  std::size_t end = text.size();
  while (end > pos && (text[end - 1] == '\n' || text[end - 1] == '\r'))
    --end;

  if (pos >= end)
    throw parse_error("graph6: empty input", pos);
  auto byte_at = [&](std::size_t i) {
    const auto b = static_cast<unsigned char>(text[i]);
    if (b < 63 || b > 126)
      throw parse_error("graph6: byte out of printable range 63..126", i);
    return b - 63;
  };

  const unsigned first = byte_at(pos);
  if (first == 63)
    throw parse_error("graph6: n > 62 is not supported", pos);
  const int n = static_cast<int>(first);
  ++pos;

  const std::size_t n_bits = static_cast<std::size_t>(n) * (n - 1) / 2;
  const std::size_t n_bytes = (n_bits + 5) / 6;
  if (end - pos < n_bytes)
    throw parse_error("graph6: truncated adjacency field", end);
  if (end - pos > n_bytes)
    throw parse_error("graph6: trailing bytes after adjacency field", pos + n_bytes);

  std::vector<Edge> edges;
  std::size_t bit = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i, ++bit) {
      const unsigned word = byte_at(pos + bit / 6);
      if ((word >> (5 - bit % 6)) & 1u)
        edges.emplace_back(i, j);
    }
  }
  // Padding bits of the final byte must be zero.
  if (n_bytes > 0) {
    const std::size_t last = pos + n_bytes - 1;
    const unsigned pad = static_cast<unsigned>(n_bytes * 6 - n_bits);
    if (byte_at(last) & ((1u << pad) - 1u))
      throw parse_error("graph6: non-zero padding bits", last);
  }
  return Graph(n, std::move(edges));
}

inline std::string to_graph6(const Graph& g) {
  const int n = g.n_vertices();
  if (n > 62)
    throw size_refusal("graph6: n > 62 is not supported");
  std::string out(1, static_cast<char>(63 + n));
  unsigned word = 0;
  int filled = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      word = (word << 1) | (g.has_edge(i, j) ? 1u : 0u);
      if (++filled == 6) {
        out.push_back(static_cast<char>(63 + word));
        word = 0;
        filled = 0;
      }
    }
  }
  if (filled > 0)
    out.push_back(static_cast<char>(63 + (word << (6 - filled))));
  return out;
}

/// Plain edge list: one "i j" pair per line, `#` starts a comment. A line with
/// a single integer declares the vertex count (for isolated trailing vertices);
/// otherwise n = largest index + 1.
inline Graph parse_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  int declared = -1;
  int max_index = -1;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos)
      line_end = text.size();
    std::string line(text.substr(line_start, line_end - line_start));
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);

    std::istringstream in(line);
    std::vector<long> values;
    std::string token;
    while (in >> token) {
      std::size_t used = 0;
      long v = 0;
      try {
        v = std::stol(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || v < 0)
        throw parse_error("edge list: expected non-negative integer, got '" + token + "'",
                          line_start);
      values.push_back(v);
    }
    if (values.size() == 1) {
      declared = static_cast<int>(values[0]);
    } else if (values.size() == 2) {
      edges.emplace_back(static_cast<int>(values[0]), static_cast<int>(values[1]));
      max_index = std::max<int>({max_index, static_cast<int>(values[0]),
                                 static_cast<int>(values[1])});
    } else if (!values.empty()) {
      throw parse_error("edge list: expected 'i j' per line", line_start);
    }
    line_start = line_end + 1;
  }
  const int n = std::max(declared, max_index + 1);
  if (n <= 0)
    throw parse_error("edge list: no vertices", 0);
  for (const auto& [a, b] : edges)
    if (a == b)
      throw parse_error("edge list: self-loop on vertex " + std::to_string(a), 0);
  return Graph(n, std::move(edges));
}

/// Accepts either a graph6 string or an edge-list text; edge lists are
/// recognized by containing whitespace-separated integers.
inline Graph parse_graph_text(std::string_view text) {
  const bool looks_like_edges =
      text.find_first_of(" \t") != std::string_view::npos ||
      std::count(text.begin(), text.end(), '\n') > 1;
  return looks_like_edges ? parse_edge_list(text) : parse_graph6(text);
}

inline void to_json(nlohmann::json& j, const Graph& g) {
  auto edges = nlohmann::json::array();
  for (const auto& [a, b] : g.edges())
    edges.push_back({a, b});
  j = nlohmann::json{{"n", g.n_vertices()}, {"edges", std::move(edges)}};
}

inline void from_json(const nlohmann::json& j, Graph& g) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  g = Graph(j.at("n").get<int>(), std::move(edges));
}

// ---------------------------------------------------------------------------
// canonical labeling

namespace detail {

// Branch-and-bound search for the lexicographically smallest upper-triangle
// adjacency string (graph6 column order, first bit most significant) over all
// vertex permutations. Bits are packed from bit 63 downwards.
class CanonicalSearch {
public:
  explicit CanonicalSearch(const Graph& g) : n_(g.n_vertices()), adj_(g.adjacency()) {}

  std::uint64_t run() {
    perm_.assign(n_, -1);
    used_.assign(n_, false);
    best_ = ~std::uint64_t{0};
    have_best_ = false;
    descend(0, 0, false);
    return n_ <= 1 ? 0 : best_;
  }

private:
  void descend(int position, std::uint64_t bits, bool below_best) {
    if (position == n_) {
      if (!have_best_ || bits < best_) {
        best_ = bits;
        have_best_ = true;
      }
      return;
    }
    const int offset = position * (position - 1) / 2; // bits already placed
    for (int v = 0; v < n_; ++v) {
      if (used_[v])
        continue;
      std::uint64_t next = bits;
      for (int i = 0; i < position; ++i)
        if (adj_[perm_[i] * n_ + v])
          next |= std::uint64_t{1} << (63 - (offset + i));
      bool strictly_below = below_best;
      if (have_best_ && !below_best && position > 0) {
        const int len = offset + position;
        const std::uint64_t mine = next >> (64 - len);
        const std::uint64_t theirs = best_ >> (64 - len);
        if (mine > theirs)
          continue;
        strictly_below = mine < theirs;
      }
      used_[v] = true;
      perm_[position] = v;
      descend(position + 1, next, strictly_below);
      used_[v] = false;
    }
  }

  int n_;
  std::vector<std::uint8_t> adj_;
  std::vector<int> perm_;
  std::vector<bool> used_;
  std::uint64_t best_ = 0;
  bool have_best_ = false;
};

} // namespace detail

inline constexpr int kMaxCanonicalVertices = 10;

/// Isomorphism-invariant label: vertex count byte followed by the minimal
/// adjacency string over all n! relabelings, big-endian.
inline std::string canonical_form(const Graph& g) {
  if (g.n_vertices() > kMaxCanonicalVertices)
    throw size_refusal("canonical_form: n > 10 refused (factorial search)");
  const std::uint64_t bits = detail::CanonicalSearch(g).run();
  std::string label(1, static_cast<char>(g.n_vertices()));
  for (int shift = 56; shift >= 0; shift -= 8)
    label.push_back(static_cast<char>((bits >> shift) & 0xffu));
  return label;
}

/// One representative per isomorphism class, ordered by edge count then
/// canonical label. Built by single-edge augmentation level by level.
inline std::vector<Graph> enumerate_non_isomorphic(int n, bool connected_only = true) {
  if (n < 1 || n > 7)
    throw std::invalid_argument("enumerate_non_isomorphic: n must be in [1, 7]");

  struct Rep {
    std::string label;
    Graph g;
  };
  std::vector<Rep> all;
  std::vector<Rep> level{{canonical_form(Graph(n)), Graph(n)}};
  const int max_edges = n * (n - 1) / 2;
  for (int m = 0;; ++m) {
    std::sort(level.begin(), level.end(),
              [](const Rep& a, const Rep& b) { return a.label < b.label; });
    all.insert(all.end(), level.begin(), level.end());
    if (m == max_edges)
      break;
    std::set<std::string> seen;
    std::vector<Rep> next;
    for (const auto& rep : level) {
      for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
          if (rep.g.has_edge(i, j))
            continue;
          auto edges = rep.g.edges();
          edges.emplace_back(i, j);
          Graph h(n, std::move(edges));
          auto label = canonical_form(h);
          if (seen.insert(label).second)
            next.push_back({std::move(label), std::move(h)});
        }
      }
    }
    level = std::move(next);
  }

  std::vector<Graph> out;
  for (auto& rep : all)
    if (!connected_only || rep.g.is_connected())
      out.push_back(std::move(rep.g));
  return out;
}

// ---------------------------------------------------------------------------
// coloring

namespace detail {

template <class Visit>
bool color_search(const Graph& g, const std::vector<std::uint8_t>& adj, int K, Coloring& c,
                  int v, Visit&& visit) {
  const int n = g.n_vertices();
  if (v == n)
    return visit(c);
  for (int color = 0; color < K; ++color) {
    bool ok = true;
    for (int u = 0; u < v && ok; ++u)
      ok = !(adj[u * n + v] && c[u] == color);
    if (!ok)
      continue;
    c[v] = color;
    if (!color_search(g, adj, K, c, v + 1, visit))
      return false;
  }
  return true;
}

} // namespace detail

/// All proper colorings V -> {0..K-1} in lexicographic order of
/// (color(0), color(1), ...).
inline std::vector<Coloring> proper_colorings(const Graph& g, int K) {
  if (K < 1)
    throw std::invalid_argument("proper_colorings: K must be >= 1");
  std::vector<Coloring> out;
  Coloring c(g.n_vertices(), 0);
  const auto adj = g.adjacency();
  detail::color_search(g, adj, K, c, 0, [&](const Coloring& col) {
    out.push_back(col);
    return true;
  });
  return out;
}

inline bool is_colorable(const Graph& g, int K) {
  bool found = false;
  Coloring c(g.n_vertices(), 0);
  const auto adj = g.adjacency();
  detail::color_search(g, adj, K, c, 0, [&](const Coloring&) {
    found = true;
    return false;
  });
  return found;
}

inline int chromatic_number(const Graph& g) {
  if (g.n_vertices() < 1)
    throw std::invalid_argument("chromatic_number: graph has no vertices");
  int K = 1;
  while (!is_colorable(g, K))
    ++K;
  return K;
}

} // namespace qac
