#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soficlab/chart.hpp"
#include "soficlab/monoid.hpp"
#include "soficlab/rational.hpp"
#include "soficlab/shifts.hpp"

namespace soficlab {

/// Counting parameters: the finite element set F (chart positions), the
/// defect tolerance delta, and the separation scale eps. Separation between
/// microstates is {0,1}-valued at the subshift level, so any eps in (0,1)
/// selects the same counts; it is validated and carried for the record.
struct GoodnessParams {
  std::vector<std::size_t> f_positions;
  Rational delta{1, 10};
  Rational eps{1, 2};
};

/// Everything a counting run needs, resolved once: the window F+ = {1} u F
/// (identity first), sigma restricted to F, and the admissible local patterns
/// over F+.
struct TraceContext {
  std::size_t carrier = 0;
  std::uint32_t alphabet = 2;
  /// chart positions forming F+, identity at index 0.
  std::vector<std::size_t> window_positions;
  /// for each m in F: its index inside the F+ window.
  std::vector<std::size_t> f_window_index;
  /// sigma(m) for each m in F, same order as params.f_positions.
  std::vector<Transformation> f_sigma;
  std::vector<std::vector<std::uint32_t>> language;
  bool approximate_admissibility = false;
  bool sm1_ok = false;
};

enum class AdmissibilityMode { Exact, LocalApproximate };

/// Resolves chart + SFT + F into a TraceContext. Exact mode requires a finite
/// monoid; local mode consumes any fragment containing the window.
TraceContext make_trace_context(const Chart& chart, const SftSpec& sft,
                                const GoodnessParams& params, const MonoidFragment& fragment,
                                AdmissibilityMode mode,
                                std::size_t config_cap = kDefaultConfigCap);

/// One admissible pattern per carrier point; the trace reads off each
/// pattern's value at the identity.
struct Microstate {
  std::vector<std::uint32_t> pattern_ids;
};

std::vector<std::uint32_t> trace_of(const Microstate& phi, const TraceContext& ctx);

/// Defect set of phi at the f_index-th element m of F: the carrier points
/// where the trace at sigma(m)(v) disagrees with phi's pattern value at m.
std::vector<std::uint32_t> defect_set(const Microstate& phi, std::size_t f_index,
                                      const TraceContext& ctx);

/// Integer defect budget floor(delta^2 * d); exact rational, no float
/// thresholds anywhere near a comparison.
std::int64_t defect_budget(const Rational& delta, std::size_t carrier);

/// True iff every defect set fits the budget.
bool is_good(const Microstate& phi, const GoodnessParams& params, const TraceContext& ctx);

/// The canonical exact microstate for a trace over the full shift:
/// pattern value at m is trace(sigma(m)(v)). All defect sets are empty and
/// distinct traces give separated microstates. Requires sigma(1) = Id.
Microstate full_shift_witness(const std::vector<std::uint32_t>& trace, const Chart& chart,
                              const TraceContext& ctx);

enum class CountMethod { Exact, SampledLowerBound, CombinatorialUpperBound };

const char* to_string(CountMethod method);
const char* to_string(AdmissibilityMode mode);

struct CountResult {
  BigInt count;
  CountMethod method = CountMethod::Exact;
  AdmissibilityMode mode = AdmissibilityMode::LocalApproximate;
};

inline constexpr std::size_t kDefaultTraceSpaceCap = std::size_t(1) << 24;

struct CountOptions {
  CountMethod method = CountMethod::Exact;
  /// exact mode refuses when |A|^d exceeds this (the witness shortcut for the
  /// full shift is closed-form and exempt).
  std::size_t trace_space_cap = kDefaultTraceSpaceCap;
  std::size_t shards = 1;
  /// sampled mode only.
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
};

/// Number of distinct traces in A^D admitting at least one good microstate.
/// Exact mode: full-shift closed form |A|^d under SM1, otherwise a
/// depth-first sweep over carrier points with per-element defect budgets
/// (deterministic, shard-count independent). Sampled mode: distinct feasible
/// traces among seeded samples — a certified lower bound. Upper-bound mode:
/// the packing/Stirling certificate — a certified upper bound.
CountResult count_good_traces(const SftSpec& sft, const GoodnessParams& params,
                              const Chart& chart, const MonoidFragment& fragment,
                              const CountOptions& options = {});

/// The depth-first counter itself, no closed-form shortcut. Exposed so tests
/// can pit it against the naive full-enumeration oracle.
BigInt count_good_traces_dfs(const GoodnessParams& params, const TraceContext& ctx,
                             std::size_t shards = 1);

/// log(count)/d in nats and in base |A|; -inf sentinel when the count is 0.
struct EntropyEstimate {
  double nats = 0.0;
  double base_a = 0.0;
};

EntropyEstimate entropy_estimate(const CountResult& result, std::size_t carrier,
                                 std::uint32_t alphabet);

/// The injectivity/packing pair of the monotonicity argument, measured on a
/// chart: V = points where s -> sigma(s)(v) collides on F, and a greedy
/// ascending-index packing U of D \ V with pairwise disjoint sigma(F)-images.
/// The preimages of the packed images must cover D \ V, forcing
/// |U| >= ceil(|D \ V| / (|F|^2 Delta_F)).
struct InjectivitySets {
  std::vector<std::uint32_t> collision_points;  // V
  std::vector<std::uint32_t> packing;           // U
  std::size_t delta_f = 1;                      // measured max fiber over sigma(F)
  std::size_t packing_lower_bound = 0;          // ceil(|D\V| / (|F|^2 Delta_F))
  bool packing_bound_ok = false;
  bool cover_ok = false;
};

InjectivitySets injectivity_sets(const Chart& chart, const std::vector<std::size_t>& f_positions);

/// Per-chart entropy deficit for a subshift avoiding a pattern on F:
/// beta0 = -log_a(1 - a^-|F|) / (2 Delta_F |F|^2), and the derived upper
/// bound (1 - beta0) log a. Requires a >= 2 and |F| >= 2.
struct Beta0Result {
  double beta0 = 0.0;
  double entropy_bound_nats = 0.0;
};

Beta0Result beta0(std::uint32_t alphabet, std::size_t f_size, std::size_t delta_f);

/// beta(t) = -t ln t - (1-t) ln(1-t): the classical tail-bound exponent,
/// valid for every d >= 1 and t <= 1/2.
double stirling_beta(const Rational& t);

/// e^{beta(t) d}, guaranteed >= sum_{j<=floor(td)} C(d,j). Requires
/// 0 < t < 1/2.
double stirling_bound(const Rational& t, std::size_t d);

/// Exact big-integer tail sum_{j=0}^{j_max} C(d, j); the oracle the bound is
/// tested against.
BigInt binomial_tail(std::size_t d, std::size_t j_max);

/// The assembled certificate of the strict-drop argument for one chart and
/// one forbidden pattern: parameter regime, measured V bound, packing, beta0,
/// Stirling factor, and the certified count bound
/// e^{beta(t) d} * |A|^{(1-beta0) d} with t = (|F|+1) delta.
struct MonotonicityReport {
  bool hypotheses_met = false;
  std::vector<std::string> unmet;

  std::size_t f_size = 0;
  Rational delta{0};
  Rational eps_required{0};  // delta / C(|F|,2)
  Rational chart_eps{0};     // max(sm2 defect, 1 - sm3 separation) over F
  bool sm1_ok = false;

  std::size_t v_size = 0;
  bool v_bound_ok = false;  // measured |V| <= delta d
  std::size_t packing_size = 0;
  std::size_t delta_f = 1;

  double beta0_value = 0.0;
  double stirling_beta_value = 0.0;
  double log_bound_nats = 0.0;    // d (beta + (1 - beta0) ln a)
  double certified_bound = 0.0;   // e^{log_bound_nats}; may overflow to inf
  double log_full_count_nats = 0.0;  // d ln a, for comparison
};

/// F is the support of the SFT's first forbidden pattern, resolved against the
/// chart's element list. Refuses the full shift outright; every other regime
/// violation is reported, not thrown. eps defaults to delta / C(|F|,2).
MonotonicityReport monotonicity_report(const SftSpec& sft, const Chart& chart,
                                       const Monoid& monoid, const Rational& delta,
                                       std::optional<Rational> eps = std::nullopt);

std::string monotonicity_to_json(const MonotonicityReport& report);

/// One sweep row per chart; failures recorded in-place so a bad chart does not
/// kill the family.
struct SweepRow {
  std::size_t carrier = 0;
  std::string method;
  std::string mode;
  BigInt count;
  bool counted = false;
  double log_per_d_nats = 0.0;
  double log_per_d_base_a = 0.0;
  std::optional<double> beta0_value;
  std::optional<double> certified_upper_bound;
};

std::vector<SweepRow> entropy_sweep(const std::vector<Chart>& charts, const SftSpec& sft,
                                    const std::vector<std::string>& f_labels,
                                    const Rational& delta, const Rational& eps,
                                    const CountOptions& options);

/// CSV with the fixed column set:
/// d,method,mode,count,log_count_per_d_nats,log_count_per_d_base_a,beta0,certified_upper_bound
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

/// Resolves F labels to chart positions; throws on an unknown label.
std::vector<std::size_t> resolve_f_labels(const Chart& chart,
                                          const std::vector<std::string>& f_labels);

/// Fragment for translate enumeration: closure of the chart elements together
/// with the SFT supports, radius 2 by default. For finite monoids the whole
/// monoid is used, enabling exact admissibility.
MonoidFragment experiment_fragment(const Chart& chart, const SftSpec& sft, MonoidPtr monoid,
                                   std::size_t radius = 2);

/// Raised when a certified bound is requested outside its parameter regime.
struct HypothesesUnmetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace soficlab
