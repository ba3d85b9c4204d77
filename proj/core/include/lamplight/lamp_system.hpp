#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lamplight/errors.hpp"

namespace lamplight {

class BaseGraph;

// Lamp configuration over the base vertices; bit x is the state of lamp x.
using LampConfig = std::uint64_t;

inline LampConfig flip_lamp(LampConfig sigma, int x) {
  return sigma ^ (LampConfig{1} << x);
}
inline bool lamp_on(LampConfig sigma, int x) {
  return (sigma >> x) & LampConfig{1};
}

// Exhaustive enumerations over configurations are capped at 2^22.
inline constexpr int kMaxEnumeratedSites = 22;

enum class MeasureKind { Uniform, BernoulliProduct, Gibbs };

// Equilibrium measure on {0,1}^sites.
//
// Gibbs uses spins s = 2 sigma - 1 and weight exp(beta * sum_{(x,y) in E}
// s(x) s(y)) over the base graph's edges (self-loops excluded), free
// boundary, coupling 1; its log-partition is precomputed by exhaustive
// summation, so construction requires sites <= kMaxEnumeratedSites.
class LampMeasure {
 public:
  static LampMeasure uniform(int sites);
  static LampMeasure bernoulli(int sites, double p);
  static LampMeasure gibbs(const BaseGraph& base, double beta);

  double log_weight(LampConfig sigma) const;

  MeasureKind kind() const { return kind_; }
  int sites() const { return sites_; }
  double p() const { return p_; }
  double beta() const { return beta_; }
  // Uniform and BernoulliProduct(1/2) are the same measure.
  bool is_uniform() const;
  std::string describe() const;

 private:
  LampMeasure(MeasureKind kind, int sites) : kind_(kind), sites_(sites) {}
  double interaction(LampConfig sigma) const;

  MeasureKind kind_;
  int sites_;
  double p_ = 0.5;
  double beta_ = 0.0;
  std::vector<std::pair<int, int>> edges_;  // Gibbs couplings
  double log_partition_ = 0.0;
};

enum class RateKind { Constant, Bernoulli, HeatBath };

// Single-site flip rates c_x(sigma) satisfying detailed balance against a
// compatible measure:
//   Constant(c)      requires a uniform measure;
//   Bernoulli(p)     1-p when the lamp is on, p when off; requires the
//                    BernoulliProduct(p) measure (or uniform when p = 1/2);
//   HeatBath         mu(sigma^x) / (mu(sigma) + mu(sigma^x)), any measure.
class FlipRateModel {
 public:
  static FlipRateModel constant(double c);
  static FlipRateModel bernoulli(double p);
  static FlipRateModel heat_bath();

  // Raw rate; does not check model/measure compatibility.
  double rate(const LampMeasure& mu, LampConfig sigma, int x) const;

  RateKind kind() const { return kind_; }
  double c() const { return c_; }
  double p() const { return p_; }
  std::string describe() const;

 private:
  explicit FlipRateModel(RateKind kind) : kind_(kind) {}
  RateKind kind_;
  double c_ = 0.5;
  double p_ = 0.5;
};

// Throws IncompatibleModel unless mu(sigma) c_x(sigma) = mu(sigma^x)
// c_x(sigma^x) holds identically for the pair.
void check_compatible(const LampMeasure& mu, const FlipRateModel& rates);

// Gated rate evaluation (checks compatibility first).
double flip_rate(const FlipRateModel& rates, const LampMeasure& mu,
                 LampConfig sigma, int x);

// a = sup_{x,sigma} c_x(sigma). Closed form except for heat-bath rates over
// a Gibbs measure, which are scanned exhaustively.
double max_rate(const FlipRateModel& rates, const LampMeasure& mu);

struct LampBalanceReport {
  double max_violation = 0.0;
  LampConfig worst_config = 0;
  int worst_site = -1;
};

// Diagnostic: exhaustive max over (sigma, x) of
// |mu(sigma) c_x(sigma) - mu(sigma^x) c_x(sigma^x)|. Works on incompatible
// pairs on purpose.
LampBalanceReport validate_lamp_detailed_balance(const LampMeasure& mu,
                                                 const FlipRateModel& rates);

// A validated measure/rate pair.
struct LampSystem {
  LampSystem(LampMeasure measure, FlipRateModel rates);
  int sites() const { return measure.sites(); }
  double max_rate() const;

  LampMeasure measure;
  FlipRateModel rates;
};

// Lamp-system document:
//   {"measure": {"kind": "uniform"|"bernoulli"|"gibbs", "p": float?,
//                "beta": float?},
//    "rates": {"kind": "constant"|"bernoulli"|"heatbath", "c": float?,
//              "p": float?}}
// The base graph supplies the site count and the Gibbs couplings.
LampSystem load_lamp_system(const std::string& json_text,
                            const BaseGraph& base);

}  // namespace lamplight
