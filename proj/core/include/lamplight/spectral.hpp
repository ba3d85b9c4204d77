#pragma once

#include <cstdint>
#include <vector>

#include "lamplight/base_graph.hpp"
#include "lamplight/functionals.hpp"
#include "lamplight/operators.hpp"

namespace lamplight {

enum class GapMethod { Dense, Iterative };

struct GapResult {
  double gap = 0.0;
  GapMethod method = GapMethod::Dense;
  double residual = 0.0;
  int iterations = 0;
  // False when the second eigenvalue is numerically zero, i.e. the chain is
  // disconnected (or has a single state).
  bool connected = true;
};

struct SpectralOptions {
  int dense_threshold = 4096;
  double tol = 1e-8;
  int max_iterations = 600;
  std::uint64_t seed = 0;
};

// Smallest nonzero eigenvalue of -L in the m-weighted inner product. Dense
// eigendecomposition up to dense_threshold states; beyond that a Lanczos
// iteration with full reorthogonalization and deflation of the constant
// eigenvector. Throws ConvergenceFailure when the iteration stalls.
GapResult spectral_gap(const SymmetricOperator& op, const WeightedSpace& m,
                       const SpectralOptions& opts = {});

// Convenience wrappers.
GapResult base_gap(const BaseGraph& g, const SpectralOptions& opts = {});

// Smallest eigenvalue of -L_base restricted to functions vanishing outside S
// (zero-extension convention). Throws EmptySubset / FullSubset.
double dirichlet_eigenvalue(const BaseGraph& g, const SubsetMask& s);

struct LambdaOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  int max_iterations = 2000;
  double tol = 1e-10;
  // Convergence requires the relative quotient change to stay below tol for
  // this many consecutive accepted steps.
  int patience = 50;
};

struct LambdaResult {
  double value = 0.0;
  // Analytic certificate bracket: lower = lambda_D(S),
  // upper = lambda_D(S) / (1 - nu(S)). The reported value always lies
  // inside; a violation throws BracketViolation.
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> minimizer;
};

// lambda(S) = inf { E_nu(f) / Var_nu(f) : f >= 0, supp(f) in S, f != const }
// by projected gradient descent with multiple restarts plus the restricted
// ground state as a deterministic start.
LambdaResult lambda_subset(const BaseGraph& g, const SubsetMask& s,
                           const LambdaOptions& opts = {});

struct ProfileOptions {
  int max_vertices = 20;
  LambdaOptions lambda;
};

struct ProfilePoint {
  double r = 0.0;
  double lambda = 0.0;
  SubsetMask minimizer;
  double bracket_lower = 0.0;
  double bracket_upper = 0.0;
};

// Spectral profile: exact infimum of lambda(S) over nonempty subsets with
// nu(S) <= r, enumerated in increasing nu(S) with lambda_D-based pruning.
ProfilePoint spectral_profile(const BaseGraph& g, double r,
                              const ProfileOptions& opts = {});

// Comparison of the profile at r = 1/2 against the spectral gap. Two
// readings are evaluated and reported, none asserted:
//   reciprocal: 1/gap <= Lambda(1/2) <= 2/gap   (as printed)
//   direct:     gap   <= Lambda(1/2) <= 2 gap
struct ProfileGapReport {
  double gap = 0.0;
  double lambda_half = 0.0;
  bool reciprocal_lower = false;
  bool reciprocal_upper = false;
  bool direct_lower = false;
  bool direct_upper = false;
};

ProfileGapReport check_profile_gap(const BaseGraph& g,
                                   const ProfileOptions& opts = {});

}  // namespace lamplight
