#include "lamplight/wreath.hpp"

#include <algorithm>
#include <cmath>

namespace lamplight {

void SparseGenerator::multiply(std::span<const double> in,
                               std::span<double> out) const {
  for (std::int64_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      acc += val[k] * in[col[k]];
    out[r] = acc;
  }
}

double SparseGenerator::entry(std::int64_t r, std::int64_t c) const {
  const auto begin = col.begin() + row_ptr[r];
  const auto end = col.begin() + row_ptr[r + 1];
  auto it = std::lower_bound(begin, end, c);
  if (it != end && *it == c) return val[it - col.begin()];
  return 0.0;
}

double SparseGenerator::max_abs_row_sum() const {
  double worst = 0.0;
  for (std::int64_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

double max_pi_asymmetry(const SparseGenerator& gen,
                        std::span<const double> pi) {
  double worst = 0.0;
  for (std::int64_t r = 0; r < gen.rows; ++r) {
    for (std::int64_t k = gen.row_ptr[r]; k < gen.row_ptr[r + 1]; ++k) {
      const std::int64_t c = gen.col[k];
      if (c < r) continue;  // each unordered pair once
      const double diff =
          std::abs(pi[r] * gen.val[k] - pi[c] * gen.entry(c, r));
      worst = std::max(worst, diff);
    }
  }
  return worst;
}

WreathChain::WreathChain(BaseGraph base, LampSystem lamps, ChainCaps caps,
                         std::string label)
    : base_(std::move(base)),
      lamps_(std::move(lamps)),
      caps_(caps),
      label_(std::move(label)) {
  if (lamps_.sites() != base_.size())
    throw DomainError("lamp system has " + std::to_string(lamps_.sites()) +
                      " sites but the base has " +
                      std::to_string(base_.size()) + " vertices");
  if (base_.size() > 57)
    throw CapExceeded("state indexing overflows past 57 base vertices");
  states_ = (std::int64_t{1} << base_.size()) * base_.size();
  if (label_.empty())
    label_ = base_.family() + " x " + lamps_.measure.describe() + "/" +
             lamps_.rates.describe();
}

std::int64_t enumerate_states(const WreathChain& chain) {
  if (chain.state_count() > chain.caps().max_enumerable_states)
    throw CapExceeded("chain has " + std::to_string(chain.state_count()) +
                      " states, enumeration cap is " +
                      std::to_string(chain.caps().max_enumerable_states));
  return chain.state_count();
}

const WeightedSpace& WreathChain::pi_space() const {
  std::call_once(pi_once_, [this] {
    enumerate_states(*this);
    const int n = base_.size();
    const std::uint64_t configs = std::uint64_t{1} << n;
    std::vector<double> log_pi_table(states_);
    double raw_sum = 0.0;
    for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
      const double log_mu = lamps_.measure.log_weight(sigma);
      for (int x = 0; x < n; ++x) {
        const double lp = log_mu + std::log(base_.nu(x));
        log_pi_table[index_of(sigma, x)] = lp;
        raw_sum += std::exp(lp);
      }
    }
    if (std::abs(raw_sum - 1.0) > 1e-10)
      throw DomainError("stationary measure sums to " +
                        std::to_string(raw_sum) + ", expected 1");
    pi_.emplace(WeightedSpace::from_log_weights(std::move(log_pi_table)));
  });
  return *pi_;
}

void WreathChain::apply_generator(std::span<const double> f,
                                  std::span<double> out) const {
  if (static_cast<std::int64_t>(f.size()) != states_ ||
      static_cast<std::int64_t>(out.size()) != states_)
    throw DomainError("function table size does not match state count");
  const int n = base_.size();
  const std::uint64_t configs = std::uint64_t{1} << n;
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
    const std::int64_t row_base = static_cast<std::int64_t>(sigma) * n;
    for (int x = 0; x < n; ++x) {
      const double fx = f[row_base + x];
      double acc = 0.0;
      for (const Edge& e : base_.neighbors(x)) {
        if (e.to == x) continue;
        acc += e.p * (f[row_base + e.to] - fx);
      }
      const double c = lamps_.rates.rate(lamps_.measure, sigma, x);
      acc += c * (f[index_of(flip_lamp(sigma, x), x)] - fx);
      out[row_base + x] = 0.5 * acc;
    }
  }
}

double WreathChain::dirichlet_form(std::span<const double> f,
                                   std::span<const double> g) const {
  if (static_cast<std::int64_t>(f.size()) != states_ ||
      static_cast<std::int64_t>(g.size()) != states_)
    throw DomainError("function table size does not match state count");
  const int n = base_.size();
  const std::uint64_t configs = std::uint64_t{1} << n;
  double walk = 0.0, flip = 0.0;
  for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
    const double log_mu = lamps_.measure.log_weight(sigma);
    const std::int64_t row_base = static_cast<std::int64_t>(sigma) * n;
    for (int x = 0; x < n; ++x) {
      const double pi_sx = std::exp(log_mu + std::log(base_.nu(x)));
      double local = 0.0;
      for (const Edge& e : base_.neighbors(x)) {
        if (e.to == x) continue;
        local += e.p * (f[row_base + e.to] - f[row_base + x]) *
                 (g[row_base + e.to] - g[row_base + x]);
      }
      walk += pi_sx * local;
      const double c = lamps_.rates.rate(lamps_.measure, sigma, x);
      const std::int64_t flipped = index_of(flip_lamp(sigma, x), x);
      flip += pi_sx * c * (f[flipped] - f[row_base + x]) *
              (g[flipped] - g[row_base + x]);
    }
  }
  return 0.25 * (walk + flip);
}

const SparseGenerator& WreathChain::assemble_generator() const {
  std::call_once(gen_once_, [this] {
    enumerate_states(*this);
    const int n = base_.size();
    const std::uint64_t configs = std::uint64_t{1} << n;

    // Row r holds at most deg(x) off-diagonal walk entries, one flip entry
    // and the diagonal.
    std::int64_t nonzeros = 0;
    for (int x = 0; x < n; ++x) {
      std::int64_t row_entries = 2;  // diagonal + flip
      for (const Edge& e : base_.neighbors(x))
        if (e.to != x) ++row_entries;
      nonzeros += row_entries * static_cast<std::int64_t>(configs);
    }
    if (nonzeros > caps_.max_sparse_nonzeros)
      throw CapExceeded("generator needs " + std::to_string(nonzeros) +
                        " nonzeros, cap is " +
                        std::to_string(caps_.max_sparse_nonzeros));

    SparseGenerator gen;
    gen.rows = states_;
    gen.row_ptr.reserve(states_ + 1);
    gen.row_ptr.push_back(0);
    gen.col.reserve(nonzeros);
    gen.val.reserve(nonzeros);

    std::vector<std::pair<std::int64_t, double>> row;
    for (std::uint64_t sigma = 0; sigma < configs; ++sigma) {
      const std::int64_t row_base = static_cast<std::int64_t>(sigma) * n;
      for (int x = 0; x < n; ++x) {
        row.clear();
        double leaving = 0.0;
        for (const Edge& e : base_.neighbors(x)) {
          if (e.to == x) continue;
          row.push_back({row_base + e.to, 0.5 * e.p});
          leaving += 0.5 * e.p;
        }
        const double c = lamps_.rates.rate(lamps_.measure, sigma, x);
        row.push_back({index_of(flip_lamp(sigma, x), x), 0.5 * c});
        leaving += 0.5 * c;
        row.push_back({row_base + x, -leaving});
        std::sort(row.begin(), row.end());
        for (const auto& [c_idx, v] : row) {
          gen.col.push_back(c_idx);
          gen.val.push_back(v);
        }
        gen.row_ptr.push_back(static_cast<std::int64_t>(gen.col.size()));
      }
    }
    generator_.emplace(std::move(gen));
  });
  return *generator_;
}

}  // namespace lamplight
