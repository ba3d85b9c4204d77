#include "lamplight/base_graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace lamplight {

BaseGraph::BaseGraph(int n, std::vector<std::vector<Edge>> adjacency,
                     std::vector<double> nu, std::string family) {
  n_ = n;
  adjacency_ = std::move(adjacency);
  nu_ = std::move(nu);
  family_ = std::move(family);
  check_structure();
  finalize();
  validate_graph(*this);
}

BaseGraph BaseGraph::unchecked(int n, std::vector<std::vector<Edge>> adjacency,
                               std::vector<double> nu, std::string family) {
  BaseGraph g;
  g.n_ = n;
  g.adjacency_ = std::move(adjacency);
  g.nu_ = std::move(nu);
  g.family_ = std::move(family);
  g.check_structure();
  g.finalize();
  return g;
}

void BaseGraph::check_structure() const {
  if (n_ <= 0) throw SchemaError("graph needs at least one vertex");
  if (static_cast<int>(adjacency_.size()) != n_)
    throw SchemaError("adjacency size does not match vertex count");
  if (static_cast<int>(nu_.size()) != n_)
    throw SchemaError("nu size does not match vertex count");
  for (int x = 0; x < n_; ++x) {
    for (const Edge& e : adjacency_[x]) {
      if (e.to < 0 || e.to >= n_)
        throw SchemaError("edge endpoint out of range at vertex " +
                          std::to_string(x));
    }
  }
}

void BaseGraph::finalize() {
  for (auto& row : adjacency_) {
    std::sort(row.begin(), row.end(),
              [](const Edge& a, const Edge& b) { return a.to < b.to; });
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i].to == row[i - 1].to)
        throw SchemaError("duplicate edge entry for pair (" +
                          std::to_string(&row - adjacency_.data()) + ", " +
                          std::to_string(row[i].to) + ")");
    }
  }
  // BFS over positive-probability edges.
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const Edge& e : adjacency_[x]) {
      if (e.p > 0.0 && !seen[e.to]) {
        seen[e.to] = 1;
        ++reached;
        stack.push_back(e.to);
      }
    }
  }
  connected_ = (reached == n_);
}

double BaseGraph::min_nu() const {
  return *std::min_element(nu_.begin(), nu_.end());
}

bool BaseGraph::uniform_nu() const {
  const double u = 1.0 / n_;
  for (double w : nu_)
    if (std::abs(w - u) > kProbTol) return false;
  return true;
}

double BaseGraph::transition(int x, int y) const {
  const auto& row = adjacency_[x];
  auto it = std::lower_bound(
      row.begin(), row.end(), y,
      [](const Edge& e, int v) { return e.to < v; });
  if (it != row.end() && it->to == y) return it->p;
  return 0.0;
}

void validate_graph(const BaseGraph& g) {
  const int n = g.size();
  double nu_sum = 0.0;
  for (int x = 0; x < n; ++x) {
    if (g.nu(x) <= 0.0)
      throw SchemaError("nu must be positive at vertex " + std::to_string(x));
    nu_sum += g.nu(x);
  }
  if (std::abs(nu_sum - 1.0) > kProbTol)
    throw SchemaError("nu sums to " + std::to_string(nu_sum) + ", expected 1");

  for (int x = 0; x < n; ++x) {
    double row_sum = 0.0;
    for (const Edge& e : g.neighbors(x)) {
      if (e.p < 0.0)
        throw SchemaError("negative transition probability at (" +
                          std::to_string(x) + ", " + std::to_string(e.to) +
                          ")");
      row_sum += e.p;
      // Adjacency must be symmetric as a relation.
      bool listed_back = false;
      for (const Edge& back : g.neighbors(e.to)) {
        if (back.to == x) {
          listed_back = true;
          break;
        }
      }
      if (!listed_back)
        throw SchemaError("vertex " + std::to_string(e.to) +
                          " does not list " + std::to_string(x) +
                          " back as a neighbor");
    }
    if (std::abs(row_sum - 1.0) > kProbTol)
      throw StochasticityError("row " + std::to_string(x) + " sums to " +
                                   std::to_string(row_sum),
                               x, row_sum);
  }

  ReversibilityReport rep = validate_reversibility(g);
  if (rep.max_violation > kProbTol)
    throw ReversibilityError(
        "detailed balance violated by " + std::to_string(rep.max_violation) +
            " at pair (" + std::to_string(rep.worst_x) + ", " +
            std::to_string(rep.worst_y) + ")",
        rep.worst_x, rep.worst_y, rep.max_violation);
}

ReversibilityReport validate_reversibility(const BaseGraph& g) {
  ReversibilityReport rep;
  for (int x = 0; x < g.size(); ++x) {
    for (const Edge& e : g.neighbors(x)) {
      const double forward = g.nu(x) * e.p;
      const double backward = g.nu(e.to) * g.transition(e.to, x);
      const double violation = std::abs(forward - backward);
      if (violation > rep.max_violation) {
        rep.max_violation = violation;
        rep.worst_x = x;
        rep.worst_y = e.to;
      }
    }
  }
  return rep;
}

BaseGraph build_torus(int side, int dim, std::int64_t cap) {
  if (side < 2) throw DomainError("torus side must be at least 2");
  if (dim < 1) throw DomainError("torus dimension must be at least 1");
  std::int64_t count = 1;
  for (int k = 0; k < dim; ++k) {
    count *= side;
    if (count > cap)
      throw CapExceeded("torus has more than " + std::to_string(cap) +
                        " vertices");
  }
  const int n = static_cast<int>(count);
  std::vector<std::vector<Edge>> adj(n);
  const double step = 1.0 / (2.0 * dim);
  std::vector<int> coords(dim);
  for (int x = 0; x < n; ++x) {
    int rest = x;
    for (int k = 0; k < dim; ++k) {
      coords[k] = rest % side;
      rest /= side;
    }
    std::int64_t stride = 1;
    for (int k = 0; k < dim; ++k) {
      const int up = x + static_cast<int>(stride) * ((coords[k] + 1) % side - coords[k]);
      const int down =
          x + static_cast<int>(stride) * ((coords[k] + side - 1) % side - coords[k]);
      if (side == 2) {
        adj[x].push_back({up, 2.0 * step});  // both directions merge
      } else {
        adj[x].push_back({up, step});
        adj[x].push_back({down, step});
      }
      stride *= side;
    }
  }
  std::vector<double> nu(n, 1.0 / n);
  std::string family = "torus(" + std::to_string(side) + "^" +
                       std::to_string(dim) + ")";
  return BaseGraph(n, std::move(adj), std::move(nu), std::move(family));
}

BaseGraph build_complete(int n) {
  if (n < 1) throw DomainError("complete graph needs at least one vertex");
  std::vector<std::vector<Edge>> adj(n);
  const double p = 1.0 / n;
  for (int x = 0; x < n; ++x) {
    adj[x].reserve(n);
    for (int y = 0; y < n; ++y) adj[x].push_back({y, p});
  }
  std::vector<double> nu(n, 1.0 / n);
  return BaseGraph(n, std::move(adj), std::move(nu),
                   "complete(" + std::to_string(n) + ")");
}

BaseGraph build_tree(int branching, int depth, std::int64_t cap) {
  if (branching < 2) throw DomainError("tree branching must be at least 2");
  if (depth < 1) throw DomainError("tree depth must be at least 1");
  std::int64_t count = 1, level = 1;
  for (int d = 0; d < depth; ++d) {
    level *= branching;
    count += level;
    if (count > cap)
      throw CapExceeded("tree has more than " + std::to_string(cap) +
                        " vertices");
  }
  const int n = static_cast<int>(count);
  const double p = 1.0 / (branching + 1);
  std::vector<std::vector<Edge>> adj(n);
  for (int v = 0; v < n; ++v) {
    int degree = 0;
    if (v > 0) {  // parent edge
      adj[v].push_back({(v - 1) / branching, p});
      ++degree;
    }
    for (int j = 0; j < branching; ++j) {
      const std::int64_t child = std::int64_t{v} * branching + 1 + j;
      if (child < n) {
        adj[v].push_back({static_cast<int>(child), p});
        ++degree;
      }
    }
    const double remainder = 1.0 - degree * p;
    if (remainder > 0.0) adj[v].push_back({v, remainder});
  }
  std::vector<double> nu(n, 1.0 / n);
  std::string family = "tree(b=" + std::to_string(branching) +
                       ",depth=" + std::to_string(depth) + ")";
  return BaseGraph(n, std::move(adj), std::move(nu), std::move(family));
}

BaseGraph build_hypercube(int bits, std::int64_t cap) {
  if (bits < 1) throw DomainError("hypercube needs at least one coordinate");
  if (bits >= 62 || (std::int64_t{1} << bits) > cap)
    throw CapExceeded("hypercube has more than " + std::to_string(cap) +
                      " vertices");
  const int n = 1 << bits;
  const double p = 1.0 / bits;
  std::vector<std::vector<Edge>> adj(n);
  for (int x = 0; x < n; ++x) {
    adj[x].reserve(bits);
    for (int k = 0; k < bits; ++k) adj[x].push_back({x ^ (1 << k), p});
  }
  std::vector<double> nu(n, 1.0 / n);
  return BaseGraph(n, std::move(adj), std::move(nu),
                   "hypercube(" + std::to_string(bits) + ")");
}

BaseGraph build_two_point() {
  std::vector<std::vector<Edge>> adj(2);
  adj[0] = {{0, 0.5}, {1, 0.5}};
  adj[1] = {{0, 0.5}, {1, 0.5}};
  return BaseGraph(2, std::move(adj), {0.5, 0.5}, "two-point");
}

namespace {

nlohmann::json parse_document(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw SchemaError("graph document is not valid JSON");
  return doc;
}

}  // namespace

BaseGraph load_graph(const std::string& json_text) {
  nlohmann::json doc = parse_document(json_text);
  if (!doc.is_object() || !doc.contains("n") ||
      !doc["n"].is_number_integer())
    throw SchemaError("graph document needs an integer field \"n\"");
  const int n = doc["n"].get<int>();
  if (n <= 0) throw SchemaError("vertex count must be positive");

  std::vector<std::vector<Edge>> adj(n);
  std::set<std::pair<int, int>> listed;
  auto add_entry = [&](int x, int y, double p) {
    if (x < 0 || x >= n || y < 0 || y >= n)
      throw SchemaError("edge endpoint out of range");
    if (!listed.insert({x, y}).second)
      throw SchemaError("pair (" + std::to_string(x) + ", " +
                        std::to_string(y) + ") listed twice");
    adj[x].push_back({y, p});
  };

  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw SchemaError("\"edges\" must be an array");
    for (const auto& item : doc["edges"]) {
      if (!item.is_array() || item.size() != 4 || !item[0].is_number_integer() ||
          !item[1].is_number_integer() || !item[2].is_number() ||
          !item[3].is_number())
        throw SchemaError("each edge must be [x, y, p_xy, p_yx]");
      const int x = item[0].get<int>();
      const int y = item[1].get<int>();
      if (x == y)
        throw SchemaError("self-loops belong in \"self_loops\", not \"edges\"");
      add_entry(x, y, item[2].get<double>());
      add_entry(y, x, item[3].get<double>());
    }
  }
  if (doc.contains("self_loops")) {
    if (!doc["self_loops"].is_array())
      throw SchemaError("\"self_loops\" must be an array");
    for (const auto& item : doc["self_loops"]) {
      if (!item.is_array() || item.size() != 2 ||
          !item[0].is_number_integer() || !item[1].is_number())
        throw SchemaError("each self loop must be [x, p_xx]");
      const int x = item[0].get<int>();
      add_entry(x, x, item[1].get<double>());
    }
  }

  std::vector<double> nu(n, 1.0 / n);
  if (doc.contains("nu")) {
    if (!doc["nu"].is_array() || static_cast<int>(doc["nu"].size()) != n)
      throw SchemaError("\"nu\" must list one weight per vertex");
    for (int x = 0; x < n; ++x) {
      if (!doc["nu"][x].is_number()) throw SchemaError("nu entries must be numbers");
      nu[x] = doc["nu"][x].get<double>();
    }
  }

  return BaseGraph(n, std::move(adj), std::move(nu), "document");
}

BaseGraph load_graph_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open graph document " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_graph(buffer.str());
}

SubsetMask::SubsetMask(int universe) : n_(universe) {
  if (universe < 0) throw DomainError("subset universe must be nonnegative");
  words_.assign((universe + 63) / 64, 0);
}

SubsetMask SubsetMask::of(int universe, std::initializer_list<int> members) {
  SubsetMask m(universe);
  for (int i : members) m.set(i);
  return m;
}

SubsetMask SubsetMask::from_bits(int universe, std::uint64_t bits) {
  if (universe > 64) throw DomainError("from_bits supports at most 64 vertices");
  SubsetMask m(universe);
  if (!m.words_.empty()) m.words_[0] = bits;
  return m;
}

int SubsetMask::count() const {
  int total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

bool SubsetMask::test(int i) const {
  return (words_[i / 64] >> (i % 64)) & 1ULL;
}

void SubsetMask::set(int i) {
  if (i < 0 || i >= n_) throw DomainError("subset member out of range");
  words_[i / 64] |= (1ULL << (i % 64));
}

void SubsetMask::reset(int i) {
  if (i < 0 || i >= n_) throw DomainError("subset member out of range");
  words_[i / 64] &= ~(1ULL << (i % 64));
}

bool SubsetMask::contains(const SubsetMask& other) const {
  for (std::size_t k = 0; k < words_.size(); ++k)
    if ((other.words_[k] & ~words_[k]) != 0) return false;
  return true;
}

std::vector<int> SubsetMask::members() const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i)
    if (test(i)) out.push_back(i);
  return out;
}

std::uint64_t SubsetMask::low_bits() const {
  return words_.empty() ? 0 : words_[0];
}

SubsetMask closure(const BaseGraph& g, const SubsetMask& b) {
  if (b.universe() != g.size())
    throw DomainError("subset universe does not match graph");
  if (b.empty()) throw EmptySubset("closure of the empty set");
  SubsetMask out(g.size());
  for (int y = 0; y < g.size(); ++y) {
    if (!b.test(y)) continue;
    for (const Edge& e : g.neighbors(y)) out.set(e.to);
  }
  return out;
}

double subset_measure(const BaseGraph& g, const SubsetMask& s) {
  double total = 0.0;
  for (int x = 0; x < g.size(); ++x)
    if (s.test(x)) total += g.nu(x);
  return total;
}

}  // namespace lamplight
