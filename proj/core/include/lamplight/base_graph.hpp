#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "lamplight/errors.hpp"

namespace lamplight {

// Absolute tolerance for probability identities (row sums, detailed balance,
// measure normalization).
inline constexpr double kProbTol = 1e-12;

inline constexpr std::int64_t kDefaultVertexCap = std::int64_t{1} << 20;

struct Edge {
  int to;
  double p;
};

// Finite graph with a row-stochastic kernel p(x,y) reversible with respect to
// a positive probability measure nu. Values are immutable after construction
// and safe to read from any number of threads.
class BaseGraph {
 public:
  // Validating constructor: throws SchemaError / StochasticityError /
  // ReversibilityError when an invariant fails.
  BaseGraph(int n, std::vector<std::vector<Edge>> adjacency,
            std::vector<double> nu, std::string family = "custom");

  // Builds without kernel validation. Structural checks (sizes, index
  // ranges) still apply. Intended for diagnostics on intentionally broken
  // kernels; everything else should use the validating constructor.
  static BaseGraph unchecked(int n, std::vector<std::vector<Edge>> adjacency,
                             std::vector<double> nu,
                             std::string family = "custom");

  int size() const { return n_; }
  std::span<const Edge> neighbors(int x) const { return adjacency_[x]; }
  double nu(int x) const { return nu_[x]; }
  const std::vector<double>& nu() const { return nu_; }
  double min_nu() const;
  bool uniform_nu() const;

  // p(x,y); zero when y is not listed as a neighbor of x.
  double transition(int x, int y) const;

  // True when the graph is connected through edges of positive probability.
  bool connected() const { return connected_; }

  const std::string& family() const { return family_; }

 private:
  BaseGraph() = default;
  void check_structure() const;
  void finalize();

  int n_ = 0;
  std::vector<std::vector<Edge>> adjacency_;
  std::vector<double> nu_;
  std::string family_ = "custom";
  bool connected_ = false;
};

// Full kernel validation: row sums, nonnegativity, symmetric adjacency
// relation, positive normalized nu, detailed balance.
void validate_graph(const BaseGraph& g);

struct ReversibilityReport {
  double max_violation = 0.0;
  int worst_x = -1;
  int worst_y = -1;
};

// Diagnostic: max over listed pairs of |nu(x)p(x,y) - nu(y)p(y,x)|.
// Never throws; meant to be usable on broken kernels.
ReversibilityReport validate_reversibility(const BaseGraph& g);

// d-dimensional torus of side n with step probability 1/(2d) per direction.
// For side 2 the two directions coincide and merge into one edge of
// probability 1/d. nu is uniform.
BaseGraph build_torus(int side, int dim, std::int64_t cap = kDefaultVertexCap);

// Complete graph K_n with p(x,y) = 1/n for every ordered pair including
// y = x, so each vertex has exactly n neighbors. nu is uniform.
BaseGraph build_complete(int n);

// Rooted complete b-ary tree with the max-degree kernel: p = 1/(b+1) per
// tree edge and the remaining mass on a self-loop. The kernel is symmetric,
// hence reversible for the uniform nu.
BaseGraph build_tree(int branching, int depth,
                     std::int64_t cap = kDefaultVertexCap);

// Hypercube {0,1}^bits with p = 1/bits across Hamming-distance-1 edges.
BaseGraph build_hypercube(int bits, std::int64_t cap = kDefaultVertexCap);

// Two vertices, p(0,1) = p(1,0) = 1/2, the remaining 1/2 on self-loops.
BaseGraph build_two_point();

// Graph document:
//   {"n": int, "edges": [[x, y, p_xy, p_yx], ...],
//    "self_loops": [[x, p_xx], ...], "nu": [float, ...]}
// Edges are listed once per unordered pair; omitted "nu" means uniform.
BaseGraph load_graph(const std::string& json_text);
BaseGraph load_graph_file(const std::filesystem::path& path);

// Subset of vertices as a bitset.
class SubsetMask {
 public:
  SubsetMask() = default;
  explicit SubsetMask(int universe);
  static SubsetMask of(int universe, std::initializer_list<int> members);
  static SubsetMask from_bits(int universe, std::uint64_t bits);

  int universe() const { return n_; }
  int count() const;
  bool test(int i) const;
  void set(int i);
  void reset(int i);
  bool empty() const { return count() == 0; }
  bool contains(const SubsetMask& other) const;
  std::vector<int> members() const;
  std::uint64_t low_bits() const;

  bool operator==(const SubsetMask&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Closure of B: every vertex adjacent to some member of B. Note the result
// need not contain B itself unless self-adjacency holds.
SubsetMask closure(const BaseGraph& g, const SubsetMask& b);

// nu(S).
double subset_measure(const BaseGraph& g, const SubsetMask& s);

}  // namespace lamplight
