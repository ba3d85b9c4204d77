#include "lamplight/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lamplight/rng.hpp"

namespace lamplight {

namespace {

// Second eigenvalue below this (relative to the largest) counts as zero,
// i.e. the chain is disconnected.
constexpr double kConnectivityTol = 1e-10;

Eigen::MatrixXd symmetrized_dense(const SymmetricOperator& op,
                                  const WeightedSpace& m) {
  const int n = op.dim();
  std::vector<double> sqrt_m(n);
  for (int i = 0; i < n; ++i) sqrt_m[i] = std::sqrt(m.weight(i));
  Eigen::MatrixXd a(n, n);
  std::vector<double> unit(n, 0.0), column(n);
  for (int j = 0; j < n; ++j) {
    unit[j] = 1.0;
    op.apply(unit, column);
    unit[j] = 0.0;
    for (int i = 0; i < n; ++i) a(i, j) = column[i] * sqrt_m[i] / sqrt_m[j];
  }
  a = 0.5 * (a + a.transpose()).eval();
  return a;
}

GapResult dense_gap(const SymmetricOperator& op, const WeightedSpace& m) {
  GapResult res;
  res.method = GapMethod::Dense;
  if (op.dim() == 1) {
    res.gap = 0.0;
    res.connected = true;  // single state, no second eigenvalue
    return res;
  }
  Eigen::MatrixXd a = symmetrized_dense(op, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(ev[ev.size() - 1]));
  res.gap = std::max(ev[1], 0.0);
  res.connected = ev[1] > kConnectivityTol * scale;
  if (!res.connected) res.gap = 0.0;
  return res;
}

// Lanczos with full reorthogonalization on the symmetrized operator, with
// the exact kernel vector sqrt(m) deflated at every step.
GapResult lanczos_gap(const SymmetricOperator& op, const WeightedSpace& m,
                      const SpectralOptions& opts) {
  const int n = op.dim();
  std::vector<double> sqrt_m(n), inv_sqrt_m(n);
  for (int i = 0; i < n; ++i) {
    sqrt_m[i] = std::sqrt(m.weight(i));
    inv_sqrt_m[i] = 1.0 / sqrt_m[i];
  }
  std::vector<double> tmp(n), applied(n);
  auto apply_sym = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) tmp[i] = in[i] * inv_sqrt_m[i];
    op.apply(tmp, applied);
    for (int i = 0; i < n; ++i) out[i] = applied[i] * sqrt_m[i];
  };
  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
  };

  // sqrt(m) has unit norm since the weights sum to one.
  const std::vector<double>& kernel = sqrt_m;

  const int max_steps = std::min(opts.max_iterations, n);
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta;

  SplitMix64 rng(mix_seed(opts.seed, 0x1a2c3057ULL));
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.next_symmetric();
  auto orthogonalize = [&](std::vector<double>& w) {
    for (int pass = 0; pass < 2; ++pass) {
      const double k = dot(w, kernel);
      for (int i = 0; i < n; ++i) w[i] -= k * kernel[i];
      for (const auto& b : basis) {
        const double c = dot(w, b);
        for (int i = 0; i < n; ++i) w[i] -= c * b[i];
      }
    }
  };
  orthogonalize(v);
  double norm = std::sqrt(dot(v, v));
  if (norm == 0.0)
    throw ConvergenceFailure("degenerate start vector", 1.0, 0);
  for (double& x : v) x /= norm;

  GapResult res;
  res.method = GapMethod::Iterative;
  std::vector<double> w(n);
  double theta = 0.0;
  Eigen::VectorXd ritz_weights;
  for (int step = 0; step < max_steps; ++step) {
    basis.push_back(v);
    apply_sym(v, w);
    const double a = dot(w, v);
    alpha.push_back(a);
    for (int i = 0; i < n; ++i) w[i] -= a * v[i];
    if (step > 0) {
      const double b_prev = beta[step - 1];
      const auto& v_prev = basis[step - 1];
      for (int i = 0; i < n; ++i) w[i] -= b_prev * v_prev[i];
    }
    orthogonalize(w);
    const double b = std::sqrt(dot(w, w));

    // Smallest Ritz value of the tridiagonal section.
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t);
    theta = small.eigenvalues()[0];
    ritz_weights = small.eigenvectors().col(0);
    const double est_residual = b * std::abs(ritz_weights[k - 1]);
    res.iterations = step + 1;

    if (b < 1e-14 || est_residual < opts.tol) {
      // True residual of the Ritz vector.
      std::vector<double> x(n, 0.0);
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) x[i] += ritz_weights[j] * basis[j][i];
      std::vector<double> ax(n);
      apply_sym(x, ax);
      double rr = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = ax[i] - theta * x[i];
        rr += d * d;
      }
      res.residual = std::sqrt(rr);
      if (res.residual < opts.tol || b < 1e-14) {
        res.gap = std::max(theta, 0.0);
        res.connected = theta > kConnectivityTol;
        if (!res.connected) res.gap = 0.0;
        return res;
      }
    }
    if (b < 1e-14) break;  // invariant subspace but residual large: stop
    beta.push_back(b);
    for (int i = 0; i < n; ++i) v[i] = w[i] / b;
  }
  throw ConvergenceFailure(
      "Lanczos did not reach tolerance " + std::to_string(opts.tol),
      res.residual > 0 ? res.residual : 1.0, res.iterations);
}

}  // namespace

GapResult spectral_gap(const SymmetricOperator& op, const WeightedSpace& m,
                       const SpectralOptions& opts) {
  if (op.dim() != m.size())
    throw DomainError("operator and measure dimensions differ");
  if (op.dim() <= opts.dense_threshold) return dense_gap(op, m);
  return lanczos_gap(op, m, opts);
}

GapResult base_gap(const BaseGraph& g, const SpectralOptions& opts) {
  BaseOperator op(g);
  return spectral_gap(op, nu_space(g), opts);
}

namespace {

// Dense symmetrized restriction of -L_base to S (zero extension).
Eigen::MatrixXd restricted_matrix(const BaseGraph& g, const SubsetMask& s,
                                  const std::vector<int>& members) {
  const int k = static_cast<int>(members.size());
  std::vector<int> local(g.size(), -1);
  for (int i = 0; i < k; ++i) local[members[i]] = i;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    const int x = members[i];
    double leaving = 0.0;
    for (const Edge& e : g.neighbors(x)) {
      if (e.to == x) continue;
      leaving += e.p;
      if (local[e.to] >= 0)
        a(i, local[e.to]) -= e.p * std::sqrt(g.nu(x) / g.nu(e.to));
    }
    a(i, i) += leaving;
  }
  a = 0.5 * (a + a.transpose()).eval();
  return a;
}

}  // namespace

double dirichlet_eigenvalue(const BaseGraph& g, const SubsetMask& s) {
  if (s.universe() != g.size())
    throw DomainError("subset universe does not match graph");
  const std::vector<int> members = s.members();
  if (members.empty()) throw EmptySubset("Dirichlet eigenvalue of empty set");
  if (static_cast<int>(members.size()) == g.size())
    throw FullSubset("Dirichlet eigenvalue needs a proper subset");
  Eigen::MatrixXd a = restricted_matrix(g, s, members);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

namespace {

struct QuotientWork {
  const BaseGraph* g;
  const WeightedSpace* nu;
  BaseOperator op;
  std::vector<int> support;
  std::vector<double> af;

  explicit QuotientWork(const BaseGraph& graph, const WeightedSpace& nu_in,
                        const std::vector<int>& members)
      : g(&graph), nu(&nu_in), op(graph), support(members), af(graph.size()) {}

  double energy(std::span<const double> f) { return base_dirichlet(*g, f); }

  double quotient(std::span<const double> f) {
    const double var = variance(*nu, f);
    if (var <= 0.0) return std::numeric_limits<double>::infinity();
    return energy(f) / var;
  }

  // Euclidean gradient of E/Var restricted to the support.
  void gradient(std::span<const double> f, double e, double var,
                std::vector<double>& grad) {
    op.apply(f, af);
    const double mu = mean(*nu, f);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (int x : support) {
      const double ge = 2.0 * nu->weight(x) * af[x];
      const double gv = 2.0 * nu->weight(x) * (f[x] - mu);
      grad[x] = (ge * var - e * gv) / (var * var);
    }
  }
};

// One projected-gradient descent run for lambda(S) from a given start.
double descend_lambda(QuotientWork& work, std::vector<double> f,
                      const LambdaOptions& opts) {
  const int n = work.g->size();
  // Normalize to nu(f^2) = 1 for conditioning.
  auto renormalize = [&](std::vector<double>& x) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += work.nu->weight(i) * x[i] * x[i];
    if (s <= 0.0) return false;
    const double inv = 1.0 / std::sqrt(s);
    for (double& v : x) v *= inv;
    return true;
  };
  if (!renormalize(f)) return std::numeric_limits<double>::infinity();

  double e = work.energy(f);
  double var = variance(*work.nu, f);
  if (var <= 0.0) return std::numeric_limits<double>::infinity();
  double q = e / var;

  std::vector<double> grad(n), trial(n);
  double step = 0.5;
  int calm = 0;
  for (int it = 0; it < opts.max_iterations && calm < opts.patience; ++it) {
    work.gradient(f, e, var, grad);
    bool accepted = false;
    for (int halving = 0; halving < 40 && !accepted; ++halving) {
      for (int i = 0; i < n; ++i) trial[i] = f[i];
      for (int x : work.support)
        trial[x] = std::max(f[x] - step * grad[x], 0.0);
      if (!renormalize(trial)) {
        step *= 0.5;
        continue;
      }
      const double te = work.energy(trial);
      const double tvar = variance(*work.nu, trial);
      if (tvar <= 0.0) {
        step *= 0.5;
        continue;
      }
      const double tq = te / tvar;
      if (tq < q) {
        const double rel = (q - tq) / std::max(q, 1e-300);
        f.swap(trial);
        e = te;
        var = tvar;
        q = tq;
        step *= 1.8;
        accepted = true;
        calm = (rel < opts.tol) ? calm + 1 : 0;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) ++calm;
    if (step < 1e-18) break;
  }
  return q;
}

}  // namespace

LambdaResult lambda_subset(const BaseGraph& g, const SubsetMask& s,
                           const LambdaOptions& opts) {
  if (s.universe() != g.size())
    throw DomainError("subset universe does not match graph");
  const std::vector<int> members = s.members();
  if (members.empty()) throw EmptySubset("lambda of the empty set");
  if (static_cast<int>(members.size()) == g.size())
    throw FullSubset("lambda needs nu(S) < 1");

  const double nu_s = subset_measure(g, s);
  Eigen::MatrixXd a = restricted_matrix(g, s, members);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double lambda_d = es.eigenvalues()[0];
  const double upper = lambda_d / (1.0 - nu_s);

  WeightedSpace nu = nu_space(g);
  QuotientWork work(g, nu, members);

  const int n = g.size();
  std::vector<double> start(n, 0.0);
  double best = std::numeric_limits<double>::infinity();

  // Deterministic start: |ground state| of the restriction mapped back to
  // the original coordinates (undo the sqrt(nu) symmetrization).
  for (std::size_t i = 0; i < members.size(); ++i)
    start[members[i]] =
        std::abs(es.eigenvectors()(i, 0)) / std::sqrt(g.nu(members[i]));
  best = std::min(best, descend_lambda(work, start, opts));

  for (int restart = 0; restart < opts.restarts; ++restart) {
    SplitMix64 rng(mix_seed(opts.seed, s.low_bits(), restart));
    std::fill(start.begin(), start.end(), 0.0);
    for (int x : members) start[x] = rng.next_unit() + 1e-3;
    best = std::min(best, descend_lambda(work, start, opts));
  }

  if (best < lambda_d - 1e-9 || best > upper + 1e-9)
    throw BracketViolation(
        "lambda(S) = " + std::to_string(best) + " escaped its bracket [" +
        std::to_string(lambda_d) + ", " + std::to_string(upper) + "]");

  LambdaResult res;
  res.value = best;
  res.lower = lambda_d;
  res.upper = upper;
  return res;
}

ProfilePoint spectral_profile(const BaseGraph& g, double r,
                              const ProfileOptions& opts) {
  if (!(r > 0.0 && r < 1.0))
    throw DomainError("profile radius must lie in (0, 1)");
  const int n = g.size();
  if (n > opts.max_vertices)
    throw CapExceeded("profile enumeration capped at " +
                      std::to_string(opts.max_vertices) + " vertices");

  // Collect admissible masks ordered by increasing nu(S), ties by mask.
  std::vector<std::pair<double, std::uint64_t>> order;
  const std::uint64_t all = (n == 64) ? ~std::uint64_t{0}
                                      : ((std::uint64_t{1} << n) - 1);
  for (std::uint64_t mask = 1; mask <= all; ++mask) {
    if (mask == all) continue;  // nu(S) = 1 excluded
    double nu_s = 0.0;
    for (int x = 0; x < n; ++x)
      if ((mask >> x) & 1ULL) nu_s += g.nu(x);
    if (nu_s <= r + kProbTol) order.push_back({nu_s, mask});
  }
  if (order.empty())
    throw DomainError("no nonempty subset has nu(S) <= r");
  std::sort(order.begin(), order.end());

  ProfilePoint best;
  best.r = r;
  best.lambda = std::numeric_limits<double>::infinity();
  for (const auto& [nu_s, mask] : order) {
    SubsetMask s = SubsetMask::from_bits(n, mask);
    const double lambda_d = dirichlet_eigenvalue(g, s);
    // lambda(S) >= lambda_D(S): subsets whose floor cannot beat the current
    // minimum are skipped without running the optimizer.
    if (lambda_d >= best.lambda - 1e-12) continue;
    LambdaResult lr = lambda_subset(g, s, opts.lambda);
    if (lr.value < best.lambda) {
      best.lambda = lr.value;
      best.minimizer = s;
      best.bracket_lower = lr.lower;
      best.bracket_upper = lr.upper;
    }
  }
  return best;
}

ProfileGapReport check_profile_gap(const BaseGraph& g,
                                   const ProfileOptions& opts) {
  ProfileGapReport rep;
  rep.gap = base_gap(g).gap;
  rep.lambda_half = spectral_profile(g, 0.5, opts).lambda;
  const double tol = 1e-9;
  rep.reciprocal_lower = 1.0 / rep.gap <= rep.lambda_half + tol;
  rep.reciprocal_upper = rep.lambda_half <= 2.0 / rep.gap + tol;
  rep.direct_lower = rep.gap <= rep.lambda_half + tol;
  rep.direct_upper = rep.lambda_half <= 2.0 * rep.gap + tol;
  return rep;
}

}  // namespace lamplight
