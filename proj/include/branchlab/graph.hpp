#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace branchlab {

using vertex_t = std::uint32_t;
using edge_t = std::uint64_t;

/// Raised by the text parsers; carries the 1-based line number of the offending line.
class GraphFormatError : public std::runtime_error {
 public:
  GraphFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct EdgeList {
  vertex_t num_vertices = 0;
  std::vector<std::pair<vertex_t, vertex_t>> pairs;

  friend bool operator==(const EdgeList&, const EdgeList&) = default;
};

/**
 * Immutable compressed-sparse-row adjacency structure.
 *
 * Neighbors of v live in neighbors()[offsets()[v] .. offsets()[v+1]).
 * The constructor enforces the structural invariants (offset monotonicity and
 * id ranges); symmetry is a property of undirected graphs only and is checked
 * separately by validate().
 */
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  Graph(std::vector<edge_t> offsets, std::vector<vertex_t> neighbors)
      : offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {
    if (offsets_.empty() || offsets_.front() != 0) {
      throw std::invalid_argument("CSR offsets must start at 0");
    }
    if (offsets_.size() - 1 > std::numeric_limits<vertex_t>::max()) {
      throw std::invalid_argument("too many vertices");
    }
    if (offsets_.back() != neighbors_.size()) {
      throw std::invalid_argument("CSR offsets must end at the neighbor count");
    }
    if (!std::is_sorted(offsets_.begin(), offsets_.end())) {
      throw std::invalid_argument("CSR offsets must be nondecreasing");
    }
    const auto n = num_vertices();
    for (vertex_t u : neighbors_) {
      if (u >= n) throw std::invalid_argument("neighbor id out of range");
    }
  }

  [[nodiscard]] vertex_t num_vertices() const noexcept {
    return static_cast<vertex_t>(offsets_.size() - 1);
  }
  [[nodiscard]] edge_t num_edges() const noexcept { return neighbors_.size(); }

  [[nodiscard]] edge_t degree(vertex_t v) const { return offsets_[v + 1] - offsets_[v]; }

  [[nodiscard]] std::span<const vertex_t> neighbors(vertex_t v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }

  [[nodiscard]] std::span<const edge_t> offsets() const noexcept { return offsets_; }
  [[nodiscard]] std::span<const vertex_t> neighbor_array() const noexcept { return neighbors_; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<edge_t> offsets_;
  std::vector<vertex_t> neighbors_;
};

/// True iff (u,v) present implies (v,u) present with equal multiplicity.
/// Requires sorted adjacency, which every constructor in this header produces.
[[nodiscard]] inline bool is_symmetric(const Graph& g) {
  for (vertex_t u = 0; u < g.num_vertices(); ++u) {
    for (vertex_t v : g.neighbors(u)) {
      auto back = g.neighbors(v);
      auto fwd = g.neighbors(u);
      if (std::count(back.begin(), back.end(), u) != std::count(fwd.begin(), fwd.end(), v)) {
        return false;
      }
    }
  }
  return true;
}

/// Checks the undirected-graph invariants not already enforced by construction.
inline void validate(const Graph& g, bool require_symmetric = true) {
  if (require_symmetric && !is_symmetric(g)) {
    throw std::invalid_argument("adjacency is not symmetric");
  }
}

/// Directed edge slots of g, in CSR order.
[[nodiscard]] inline EdgeList to_edge_list(const Graph& g) {
  EdgeList list{g.num_vertices(), {}};
  list.pairs.reserve(g.num_edges());
  for (vertex_t u = 0; u < g.num_vertices(); ++u) {
    for (vertex_t v : g.neighbors(u)) list.pairs.emplace_back(u, v);
  }
  return list;
}

/**
 * Builds a CSR graph with ascending neighbor lists.
 *
 * Self-loops are dropped. With symmetrize set, every (u,v) is mirrored and
 * duplicate slots collapse; without it the pairs are kept as given (minus
 * self-loops and duplicates).
 */
[[nodiscard]] inline Graph to_csr(const EdgeList& list, bool symmetrize) {
  const vertex_t n = list.num_vertices;
  std::vector<std::pair<vertex_t, vertex_t>> slots;
  slots.reserve(list.pairs.size() * (symmetrize ? 2 : 1));
  for (auto [u, v] : list.pairs) {
    if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) continue;
    slots.emplace_back(u, v);
    if (symmetrize) slots.emplace_back(v, u);
  }
  std::sort(slots.begin(), slots.end());
  slots.erase(std::unique(slots.begin(), slots.end()), slots.end());

  std::vector<edge_t> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<vertex_t> neighbors;
  neighbors.reserve(slots.size());
  for (auto [u, v] : slots) {
    ++offsets[u + 1];
    neighbors.push_back(v);
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return Graph(std::move(offsets), std::move(neighbors));
}

namespace detail {

inline bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

// Parses a non-negative integer token; returns false on anything else.
inline bool parse_count(const std::string& token, std::uint64_t& out) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) return false;
  try {
    out = std::stoull(token);
  } catch (const std::out_of_range&) {
    return false;
  }
  return true;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
  return tokens;
}

}  // namespace detail

/**
 * Reads a METIS/Chaco adjacency file.
 *
 * Header: "|V| |E| [fmt [ncon]]" where |E| counts undirected edges. Then one
 * line per vertex listing 1-based neighbor ids. '%' lines are comments.
 * Vertex sizes/weights and edge weights announced by fmt are skipped.
 * The result is a validated undirected graph with 2|E| directed slots.
 */
[[nodiscard]] inline Graph load_metis(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  auto next_content_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (!out.empty() && out[0] == '%') continue;
      return true;
    }
    return false;
  };

  // Header: skip leading comments and blank lines.
  bool have_header = false;
  while (next_content_line(line)) {
    if (!detail::is_blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw GraphFormatError(line_no, "missing METIS header");

  const auto header = detail::split_ws(line);
  std::uint64_t n = 0, m = 0, fmt_code = 0, ncon = 1;
  if (header.size() < 2 || header.size() > 4 || !detail::parse_count(header[0], n) ||
      !detail::parse_count(header[1], m)) {
    throw GraphFormatError(line_no, "malformed header, expected \"|V| |E| [fmt [ncon]]\"");
  }
  if (header.size() >= 3) {
    const auto& fmt = header[2];
    if (fmt.size() > 3 || fmt.find_first_not_of("01") != std::string::npos) {
      throw GraphFormatError(line_no, "malformed fmt field '" + fmt + "'");
    }
    fmt_code = std::stoull(fmt);
  }
  if (header.size() == 4 && !detail::parse_count(header[3], ncon)) {
    throw GraphFormatError(line_no, "malformed ncon field");
  }
  if (n > std::numeric_limits<vertex_t>::max()) {
    throw GraphFormatError(line_no, "vertex count too large");
  }
  const bool has_vsize = (fmt_code / 100) % 10 == 1;
  const bool has_vweight = (fmt_code / 10) % 10 == 1;
  const bool has_eweight = fmt_code % 10 == 1;
  const std::size_t leading = (has_vsize ? 1 : 0) + (has_vweight ? ncon : 0);
  const std::size_t stride = has_eweight ? 2 : 1;

  std::vector<edge_t> offsets(n + 1, 0);
  std::vector<vertex_t> neighbors;
  neighbors.reserve(2 * m);
  std::vector<std::size_t> vertex_line(n, 0);

  for (std::uint64_t v = 0; v < n; ++v) {
    if (!next_content_line(line)) {
      throw GraphFormatError(line_no, "expected " + std::to_string(n) + " adjacency lines, found " +
                                          std::to_string(v));
    }
    vertex_line[v] = line_no;
    const auto tokens = detail::split_ws(line);
    if (tokens.size() < leading || (tokens.size() - leading) % stride != 0) {
      throw GraphFormatError(line_no, "adjacency line does not match fmt");
    }
    const auto first = neighbors.size();
    for (std::size_t i = leading; i < tokens.size(); i += stride) {
      std::uint64_t id = 0;
      if (!detail::parse_count(tokens[i], id)) {
        throw GraphFormatError(line_no, "neighbor '" + tokens[i] + "' is not an integer");
      }
      if (id < 1 || id > n) {
        throw GraphFormatError(line_no, "neighbor id " + tokens[i] + " out of range [1, " +
                                            std::to_string(n) + "]");
      }
      if (id - 1 == v) throw GraphFormatError(line_no, "self-loop on vertex " + std::to_string(v + 1));
      neighbors.push_back(static_cast<vertex_t>(id - 1));
    }
    std::sort(neighbors.begin() + static_cast<std::ptrdiff_t>(first), neighbors.end());
    if (std::adjacent_find(neighbors.begin() + static_cast<std::ptrdiff_t>(first), neighbors.end()) !=
        neighbors.end()) {
      throw GraphFormatError(line_no, "duplicate neighbor");
    }
    offsets[v + 1] = neighbors.size();
  }
  while (next_content_line(line)) {
    if (!detail::is_blank(line)) throw GraphFormatError(line_no, "unexpected content after last vertex");
  }

  Graph g(std::move(offsets), std::move(neighbors));
  for (vertex_t u = 0; u < g.num_vertices(); ++u) {
    for (vertex_t v : g.neighbors(u)) {
      auto back = g.neighbors(v);
      if (!std::binary_search(back.begin(), back.end(), u)) {
        throw GraphFormatError(vertex_line[u], "asymmetric adjacency: " + std::to_string(u + 1) +
                                                   " lists " + std::to_string(v + 1) + " but not vice versa");
      }
    }
  }
  if (g.num_edges() != 2 * m) {
    throw GraphFormatError(1, "header announces " + std::to_string(m) + " edges, adjacency holds " +
                                  std::to_string(g.num_edges() / 2));
  }
  return g;
}

/// Writes g in METIS format (no fmt field, 1-based ids). Requires a symmetric graph.
inline void write_metis(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() / 2 << '\n';
  for (vertex_t v = 0; v < g.num_vertices(); ++v) {
    bool first = true;
    for (vertex_t u : g.neighbors(v)) {
      if (!first) out << ' ';
      out << u + 1;
      first = false;
    }
    out << '\n';
  }
}

/// Whitespace-separated "u v" pairs, 0-based, '#' comment lines. Order and multiplicity kept.
[[nodiscard]] inline EdgeList load_edge_list(std::istream& in, vertex_t num_vertices) {
  EdgeList list{num_vertices, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto tokens = detail::split_ws(line);
    if (tokens.size() != 2) throw GraphFormatError(line_no, "expected two vertex ids");
    std::uint64_t ids[2];
    for (int i = 0; i < 2; ++i) {
      if (!detail::parse_count(tokens[i], ids[i])) {
        throw GraphFormatError(line_no, "token '" + tokens[i] + "' is not an integer");
      }
      if (ids[i] >= num_vertices) {
        throw GraphFormatError(line_no, "vertex id " + tokens[i] + " >= " + std::to_string(num_vertices));
      }
    }
    list.pairs.emplace_back(static_cast<vertex_t>(ids[0]), static_cast<vertex_t>(ids[1]));
  }
  return list;
}

/**
 * Erdos-Renyi G(n, m): m distinct undirected edges drawn uniformly without
 * replacement, returned as a symmetrized CSR graph. Deterministic in seed.
 */
[[nodiscard]] inline Graph generate_random(vertex_t num_vertices, std::uint64_t num_undirected_edges,
                                           std::uint64_t seed) {
  const std::uint64_t n = num_vertices;
  const std::uint64_t capacity = n < 2 ? 0 : n * (n - 1) / 2;
  if (num_undirected_edges > capacity) {
    throw std::invalid_argument("edge budget " + std::to_string(num_undirected_edges) +
                                " exceeds simple-graph capacity " + std::to_string(capacity));
  }
  std::mt19937_64 rng(seed);
  EdgeList list{num_vertices, {}};
  list.pairs.reserve(num_undirected_edges);

  if (num_undirected_edges * 2 > capacity) {
    // Dense: partial Fisher-Yates over the full pair list.
    std::vector<std::pair<vertex_t, vertex_t>> all;
    all.reserve(capacity);
    for (vertex_t u = 0; u < num_vertices; ++u) {
      for (vertex_t v = u + 1; v < num_vertices; ++v) all.emplace_back(u, v);
    }
    for (std::uint64_t i = 0; i < num_undirected_edges; ++i) {
      std::uniform_int_distribution<std::uint64_t> pick(i, all.size() - 1);
      std::swap(all[i], all[pick(rng)]);
      list.pairs.push_back(all[i]);
    }
  } else {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(num_undirected_edges * 2);
    std::uniform_int_distribution<vertex_t> pick(0, num_vertices == 0 ? 0 : num_vertices - 1);
    while (list.pairs.size() < num_undirected_edges) {
      vertex_t u = pick(rng), v = pick(rng);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) list.pairs.emplace_back(u, v);
    }
  }
  return to_csr(list, /*symmetrize=*/true);
}

struct DiameterInfo {
  /// Diameter of the component with the most vertices (ties: smallest member id).
  std::uint64_t largest_component = 0;
  /// Maximum diameter over all components; bounds label-propagation rounds.
  std::uint64_t max_component = 0;
  bool disconnected = false;
};

/// Exact diameter by BFS from every vertex; O(|V|(|V|+|E|)).
[[nodiscard]] inline DiameterInfo diameter(const Graph& g) {
  const vertex_t n = g.num_vertices();
  constexpr auto unseen = std::numeric_limits<std::uint64_t>::max();
  std::vector<vertex_t> component(n, std::numeric_limits<vertex_t>::max());
  std::vector<std::uint64_t> comp_size;
  std::vector<std::uint64_t> comp_diam;
  std::vector<std::uint64_t> dist(n, unseen);
  std::vector<vertex_t> queue;
  queue.reserve(n);

  for (vertex_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), unseen);
    queue.clear();
    queue.push_back(s);
    dist[s] = 0;
    std::uint64_t ecc = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const vertex_t v = queue[head];
      ecc = std::max(ecc, dist[v]);
      for (vertex_t w : g.neighbors(v)) {
        if (dist[w] == unseen) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
      }
    }
    if (component[s] == std::numeric_limits<vertex_t>::max()) {
      const auto id = static_cast<vertex_t>(comp_size.size());
      for (vertex_t v : queue) component[v] = id;
      comp_size.push_back(queue.size());
      comp_diam.push_back(0);
    }
    auto& d = comp_diam[component[s]];
    d = std::max(d, ecc);
  }

  DiameterInfo info;
  info.disconnected = comp_size.size() > 1;
  std::size_t largest = 0;
  for (std::size_t c = 0; c < comp_size.size(); ++c) {
    if (comp_size[c] > comp_size[largest]) largest = c;
    info.max_component = std::max(info.max_component, comp_diam[c]);
  }
  if (!comp_size.empty()) info.largest_component = comp_diam[largest];
  return info;
}

}  // namespace branchlab
