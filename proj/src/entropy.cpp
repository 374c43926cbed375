#include "soficlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "soficlab/prng.hpp"

namespace soficlab {

const char* to_string(CountMethod method) {
  switch (method) {
    case CountMethod::Exact: return "exact";
    case CountMethod::SampledLowerBound: return "sampled-lower-bound";
    case CountMethod::CombinatorialUpperBound: return "combinatorial-upper-bound";
  }
  return "?";
}

const char* to_string(AdmissibilityMode mode) {
  return mode == AdmissibilityMode::Exact ? "exact" : "local-approximate";
}

// -- context -------------------------------------------------------------------

namespace {

void validate_params(const GoodnessParams& params, const Chart& chart) {
  if (params.f_positions.empty()) {
    throw std::invalid_argument("F must be nonempty");
  }
  std::set<std::size_t> seen;
  for (std::size_t p : params.f_positions) {
    if (p >= chart.elements.size()) {
      throw std::invalid_argument("F position outside the chart");
    }
    if (!seen.insert(p).second) {
      throw std::invalid_argument("F has a repeated element");
    }
  }
  if (params.delta <= Rational(0)) {
    throw std::invalid_argument("delta must be positive");
  }
  if (params.eps <= Rational(0) || params.eps >= Rational(1)) {
    throw std::invalid_argument("eps must lie in (0,1)");
  }
}

}  // namespace

TraceContext make_trace_context(const Chart& chart, const SftSpec& sft,
                                const GoodnessParams& params, const MonoidFragment& fragment,
                                AdmissibilityMode mode, std::size_t config_cap) {
  validate_params(params, chart);
  validate_sft(sft);

  TraceContext ctx;
  ctx.carrier = chart.carrier;
  ctx.alphabet = sft.alphabet.size;
  ctx.sm1_ok = chart.sigma[chart.identity_pos].is_identity();

  // window F+ = {1} u F, identity first
  ctx.window_positions.push_back(chart.identity_pos);
  for (std::size_t p : params.f_positions) {
    if (p != chart.identity_pos) {
      ctx.window_positions.push_back(p);
    }
  }
  for (std::size_t p : params.f_positions) {
    const auto at = std::find(ctx.window_positions.begin(), ctx.window_positions.end(), p);
    ctx.f_window_index.push_back(
        static_cast<std::size_t>(at - ctx.window_positions.begin()));
    ctx.f_sigma.push_back(chart.sigma[p]);
  }

  std::vector<std::size_t> window_in_fragment;
  for (std::size_t p : ctx.window_positions) {
    const auto pos = fragment.find(chart.elements[p]);
    if (!pos.has_value()) {
      throw std::invalid_argument("chart element not in fragment: " + chart.elements[p]);
    }
    window_in_fragment.push_back(*pos);
  }

  if (mode == AdmissibilityMode::Exact) {
    const FiniteMonoid* finite = fragment.monoid().as_finite();
    if (finite == nullptr || !fragment.covers_monoid()) {
      throw std::invalid_argument("exact admissibility needs a whole finite monoid");
    }
    LocalLanguage language = local_language_exact(sft, window_in_fragment, *finite, config_cap);
    ctx.language = std::move(language.patterns);
    ctx.approximate_admissibility = false;
  } else {
    LocalLanguage language = local_language(sft, window_in_fragment, fragment);
    ctx.language = std::move(language.patterns);
    ctx.approximate_admissibility = true;
  }
  return ctx;
}

std::vector<std::uint32_t> trace_of(const Microstate& phi, const TraceContext& ctx) {
  std::vector<std::uint32_t> trace(ctx.carrier);
  for (std::size_t v = 0; v < ctx.carrier; ++v) {
    trace[v] = ctx.language[phi.pattern_ids[v]][0];
  }
  return trace;
}

std::vector<std::uint32_t> defect_set(const Microstate& phi, std::size_t f_index,
                                      const TraceContext& ctx) {
  if (f_index >= ctx.f_sigma.size()) {
    throw std::invalid_argument("defect_set: element not in F");
  }
  const std::vector<std::uint32_t> trace = trace_of(phi, ctx);
  const Transformation& sigma_m = ctx.f_sigma[f_index];
  const std::size_t m_at = ctx.f_window_index[f_index];
  std::vector<std::uint32_t> defects;
  for (std::size_t v = 0; v < ctx.carrier; ++v) {
    if (trace[sigma_m(v)] != ctx.language[phi.pattern_ids[v]][m_at]) {
      defects.push_back(static_cast<std::uint32_t>(v));
    }
  }
  return defects;
}

std::int64_t defect_budget(const Rational& delta, std::size_t carrier) {
  if (delta <= Rational(0)) {
    throw std::invalid_argument("delta must be positive");
  }
  const BigInt num = BigInt(delta.numerator()) * delta.numerator() * carrier;
  const BigInt den = BigInt(delta.denominator()) * delta.denominator();
  BigInt floor = num / den;
  if (floor > static_cast<std::int64_t>(carrier)) {
    floor = static_cast<std::int64_t>(carrier);  // defect sets never exceed the carrier
  }
  return static_cast<std::int64_t>(floor);
}

bool is_good(const Microstate& phi, const GoodnessParams& params, const TraceContext& ctx) {
  const std::int64_t budget = defect_budget(params.delta, ctx.carrier);
  for (std::size_t j = 0; j < ctx.f_sigma.size(); ++j) {
    if (static_cast<std::int64_t>(defect_set(phi, j, ctx).size()) > budget) {
      return false;
    }
  }
  return true;
}

Microstate full_shift_witness(const std::vector<std::uint32_t>& trace, const Chart& chart,
                              const TraceContext& ctx) {
  if (!ctx.sm1_ok) {
    throw std::invalid_argument("full_shift_witness requires sigma(1) = Id");
  }
  if (trace.size() != ctx.carrier) {
    throw std::invalid_argument("trace length must match the carrier");
  }
  Microstate phi;
  phi.pattern_ids.resize(ctx.carrier);
  std::vector<std::uint32_t> pattern(ctx.window_positions.size());
  for (std::size_t v = 0; v < ctx.carrier; ++v) {
    for (std::size_t i = 0; i < ctx.window_positions.size(); ++i) {
      pattern[i] = trace[chart.sigma[ctx.window_positions[i]](v)];
    }
    const auto found = std::find(ctx.language.begin(), ctx.language.end(), pattern);
    if (found == ctx.language.end()) {
      throw std::invalid_argument("witness pattern is not admissible");
    }
    phi.pattern_ids[v] = static_cast<std::uint32_t>(found - ctx.language.begin());
  }
  return phi;
}

// -- exact counting --------------------------------------------------------------

namespace {

/// Per-point defect bookkeeping for the depth-first trace sweep. Count vectors
/// over F are packed one byte per element; the reachable set is kept
/// Pareto-minimal (componentwise) so budgets prune hard.
struct TraceCounter {
  std::size_t carrier = 0;
  std::uint32_t alphabet = 2;
  std::size_t f_count = 0;
  std::int64_t budget = 0;
  std::vector<std::vector<std::uint32_t>> img;        // img[j][v] = sigma(F_j)(v)
  std::vector<std::vector<std::uint32_t>> lang;       // patterns over F+
  std::vector<std::vector<std::uint32_t>> by_trace;   // pattern ids per trace symbol
  std::vector<std::size_t> f_window_index;
  std::vector<std::vector<std::uint32_t>> ready_at;   // points evaluable at depth t

  explicit TraceCounter(const GoodnessParams& params, const TraceContext& ctx)
      : carrier(ctx.carrier),
        alphabet(ctx.alphabet),
        f_count(ctx.f_sigma.size()),
        budget(defect_budget(params.delta, ctx.carrier)),
        lang(ctx.language),
        f_window_index(ctx.f_window_index) {
    if (lang.empty()) {
      throw std::invalid_argument("local language is empty");
    }
    if (f_count > 8) {
      throw CapExceededError("exact counting supports |F| <= 8");
    }
    if (budget > 255) {
      throw CapExceededError("defect budget exceeds the packed-counter range");
    }
    img.resize(f_count);
    for (std::size_t j = 0; j < f_count; ++j) {
      img[j].resize(carrier);
      for (std::size_t v = 0; v < carrier; ++v) {
        img[j][v] = ctx.f_sigma[j](v);
      }
    }
    by_trace.resize(alphabet);
    for (std::size_t id = 0; id < lang.size(); ++id) {
      by_trace[lang[id][0]].push_back(static_cast<std::uint32_t>(id));
    }
    ready_at.resize(carrier);
    for (std::size_t v = 0; v < carrier; ++v) {
      std::size_t ready = v;
      for (std::size_t j = 0; j < f_count; ++j) {
        ready = std::max<std::size_t>(ready, img[j][v]);
      }
      ready_at[ready].push_back(static_cast<std::uint32_t>(v));
    }
  }

  using State = std::vector<std::uint64_t>;  // packed Pareto-minimal count vectors

  static bool dominates(std::uint64_t a, std::uint64_t b) {
    // bytewise a <= b
    for (std::size_t j = 0; j < 8; ++j) {
      if (((a >> (8 * j)) & 0xFF) > ((b >> (8 * j)) & 0xFF)) return false;
    }
    return true;
  }

  /// Defect masks available at point v once the trace is known at v and at
  /// every image of v.
  void masks_for(std::uint32_t v, const std::vector<std::uint32_t>& trace,
                 std::vector<std::uint32_t>& out) const {
    out.clear();
    for (std::uint32_t id : by_trace[trace[v]]) {
      std::uint32_t mask = 0;
      for (std::size_t j = 0; j < f_count; ++j) {
        if (lang[id][f_window_index[j]] != trace[img[j][v]]) {
          mask |= 1u << j;
        }
      }
      if (mask == 0) {
        out.assign(1, 0);  // a defect-free pattern dominates every other choice
        return;
      }
      if (std::find(out.begin(), out.end(), mask) == out.end()) {
        out.push_back(mask);
      }
    }
  }

  State expand(const State& state, const std::vector<std::uint32_t>& masks) const {
    if (masks.empty()) {
      return {};
    }
    if (masks.size() == 1 && masks[0] == 0) {
      return state;
    }
    State next;
    for (std::uint64_t packed : state) {
      for (std::uint32_t mask : masks) {
        std::uint64_t bumped = packed;
        bool ok = true;
        for (std::size_t j = 0; j < f_count && ok; ++j) {
          if (mask & (1u << j)) {
            const std::uint64_t count = (bumped >> (8 * j)) & 0xFF;
            if (static_cast<std::int64_t>(count) + 1 > budget) {
              ok = false;
            } else {
              bumped += std::uint64_t(1) << (8 * j);
            }
          }
        }
        if (ok) {
          next.push_back(bumped);
        }
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    State minimal;
    for (std::uint64_t candidate : next) {
      bool dominated = false;
      for (std::uint64_t kept : minimal) {
        if (dominates(kept, candidate)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) {
        minimal.push_back(candidate);
      }
    }
    return minimal;
  }

  /// Advances the DP through depth t for a fixed trace prefix.
  bool step(std::size_t t, const std::vector<std::uint32_t>& trace, State& state,
            std::vector<std::uint32_t>& scratch) const {
    for (std::uint32_t v : ready_at[t]) {
      masks_for(v, trace, scratch);
      state = expand(state, scratch);
      if (state.empty()) {
        return false;
      }
    }
    return true;
  }

  BigInt count_from(std::size_t depth, std::vector<std::uint32_t>& trace,
                    const State& state) const {
    if (depth == carrier) {
      return 1;
    }
    BigInt total = 0;
    std::vector<std::uint32_t> scratch;
    for (std::uint32_t s = 0; s < alphabet; ++s) {
      trace[depth] = s;
      State next = state;
      if (step(depth, trace, next, scratch)) {
        total += count_from(depth + 1, trace, next);
      }
    }
    return total;
  }

  bool feasible(const std::vector<std::uint32_t>& trace) const {
    State state{0};
    std::vector<std::uint32_t> scratch;
    for (std::size_t t = 0; t < carrier; ++t) {
      if (!step(t, trace, state, scratch)) {
        return false;
      }
    }
    return true;
  }
};

}  // namespace

BigInt count_good_traces_dfs(const GoodnessParams& params, const TraceContext& ctx,
                             std::size_t shards) {
  const TraceCounter counter(params, ctx);
  const std::size_t d = ctx.carrier;
  if (shards <= 1 || d == 0) {
    std::vector<std::uint32_t> trace(d, 0);
    return counter.count_from(0, trace, TraceCounter::State{0});
  }

  // split on a trace prefix; shard assignment never changes the sum
  std::size_t prefix_len = 0;
  std::size_t prefix_count = 1;
  while (prefix_count < shards && prefix_len < d) {
    prefix_count *= ctx.alphabet;
    ++prefix_len;
  }
  const std::size_t plen = prefix_len;

  auto run_shard = [&](std::size_t shard) {
    BigInt total = 0;
    std::vector<std::uint32_t> trace(d, 0);
    std::vector<std::uint32_t> scratch;
    for (std::size_t prefix = shard; prefix < prefix_count; prefix += shards) {
      std::size_t acc = prefix;
      for (std::size_t t = 0; t < plen; ++t) {
        trace[t] = static_cast<std::uint32_t>(acc % ctx.alphabet);
        acc /= ctx.alphabet;
      }
      TraceCounter::State state{0};
      bool alive = true;
      for (std::size_t t = 0; t < plen && alive; ++t) {
        alive = counter.step(t, trace, state, scratch);
      }
      if (alive) {
        total += counter.count_from(plen, trace, state);
      }
    }
    return total;
  };

  std::vector<std::future<BigInt>> futures;
  futures.reserve(shards);
  for (std::size_t shard = 0; shard < shards; ++shard) {
    futures.push_back(std::async(std::launch::async, run_shard, shard));
  }
  BigInt total = 0;
  for (auto& f : futures) {
    total += f.get();
  }
  return total;
}

// -- counting entry point ---------------------------------------------------------

namespace {

BigInt pow_bigint(std::uint64_t base, std::size_t exponent) {
  BigInt out = 1;
  for (std::size_t i = 0; i < exponent; ++i) {
    out *= base;
  }
  return out;
}

BigInt sampled_count(const GoodnessParams& params, const TraceContext& ctx,
                     const CountOptions& options) {
  const TraceCounter counter(params, ctx);
  std::set<std::vector<std::uint32_t>> found;
  for (std::size_t i = 0; i < options.samples; ++i) {
    Rng rng = stream_for_index(options.seed, i);
    std::vector<std::uint32_t> trace(ctx.carrier);
    for (std::size_t v = 0; v < ctx.carrier; ++v) {
      trace[v] = static_cast<std::uint32_t>(uniform_below(rng, ctx.alphabet));
    }
    if (found.contains(trace)) continue;
    if (counter.feasible(trace)) {
      found.insert(std::move(trace));
    }
  }
  return BigInt(found.size());
}

BigInt certified_upper_count(const SftSpec& sft, const GoodnessParams& params,
                             const Chart& chart, const MonoidFragment& fragment) {
  const BigInt trivial = pow_bigint(sft.alphabet.size, chart.carrier);
  if (sft.is_full_shift()) {
    return trivial;
  }
  const MonotonicityReport report =
      monotonicity_report(sft, chart, fragment.monoid(), params.delta);
  if (!report.hypotheses_met) {
    std::string why = "certified bound unavailable:";
    for (const auto& reason : report.unmet) {
      why += " " + reason + ";";
    }
    throw HypothesesUnmetError(why);
  }
  // The certificate is proven for F = support; it bounds every count whose F
  // contains the support at the same delta.
  std::vector<std::size_t> support_positions;
  for (const auto& label : sft.forbidden[0].support) {
    const auto pos = chart.find_element(label);
    if (!pos.has_value() ||
        std::find(params.f_positions.begin(), params.f_positions.end(), *pos) ==
            params.f_positions.end()) {
      throw HypothesesUnmetError("F must contain the forbidden pattern's support");
    }
    support_positions.push_back(*pos);
  }
  if (!std::isfinite(report.certified_bound)) {
    return trivial;
  }
  const double padded = std::nextafter(report.certified_bound,
                                       std::numeric_limits<double>::infinity());
  BigInt bound(std::floor(padded));
  return std::min(bound, trivial);
}

}  // namespace

CountResult count_good_traces(const SftSpec& sft, const GoodnessParams& params,
                              const Chart& chart, const MonoidFragment& fragment,
                              const CountOptions& options) {
  validate_params(params, chart);
  const AdmissibilityMode mode = fragment.covers_monoid() ? AdmissibilityMode::Exact
                                                          : AdmissibilityMode::LocalApproximate;
  CountResult result;
  result.method = options.method;
  result.mode = mode;

  if (options.method == CountMethod::CombinatorialUpperBound) {
    result.count = certified_upper_count(sft, params, chart, fragment);
    return result;
  }

  const TraceContext ctx = make_trace_context(chart, sft, params, fragment, mode);

  if (options.method == CountMethod::SampledLowerBound) {
    result.count = sampled_count(params, ctx, options);
    return result;
  }

  // exact: the witness construction settles the full shift in closed form
  if (sft.is_full_shift() && ctx.sm1_ok) {
    result.count = pow_bigint(sft.alphabet.size, chart.carrier);
    return result;
  }
  if (pow_bigint(sft.alphabet.size, chart.carrier) >
      BigInt(static_cast<std::uint64_t>(options.trace_space_cap))) {
    throw CapExceededError("trace space exceeds exact-mode cap");
  }
  result.count = count_good_traces_dfs(params, ctx, options.shards);
  return result;
}

EntropyEstimate entropy_estimate(const CountResult& result, std::size_t carrier,
                                 std::uint32_t alphabet) {
  EntropyEstimate est;
  if (result.count == 0) {
    est.nats = -std::numeric_limits<double>::infinity();
    est.base_a = -std::numeric_limits<double>::infinity();
    return est;
  }
  est.nats = log_bigint(result.count) / static_cast<double>(carrier);
  est.base_a = alphabet >= 2 ? est.nats / std::log(static_cast<double>(alphabet)) : 0.0;
  return est;
}

// -- monotonicity machinery --------------------------------------------------------

InjectivitySets injectivity_sets(const Chart& chart,
                                 const std::vector<std::size_t>& f_positions) {
  if (f_positions.empty()) {
    throw std::invalid_argument("F must be nonempty");
  }
  for (std::size_t p : f_positions) {
    if (p >= chart.elements.size()) {
      throw std::invalid_argument("F position outside the chart");
    }
  }
  const std::size_t d = chart.carrier;
  const std::size_t f = f_positions.size();

  InjectivitySets sets;
  std::vector<bool> collides(d, false);
  for (std::size_t v = 0; v < d; ++v) {
    for (std::size_t i = 0; i < f && !collides[v]; ++i) {
      for (std::size_t j = i + 1; j < f && !collides[v]; ++j) {
        collides[v] = chart.sigma[f_positions[i]](v) == chart.sigma[f_positions[j]](v);
      }
    }
    if (collides[v]) {
      sets.collision_points.push_back(static_cast<std::uint32_t>(v));
    }
  }

  std::size_t delta_f = 1;
  for (std::size_t p : f_positions) {
    delta_f = std::max(delta_f, max_fiber(chart.sigma[p]));
  }
  sets.delta_f = delta_f;

  // greedy ascending-index packing with pairwise disjoint sigma(F)-images
  std::vector<bool> used(d, false);
  for (std::size_t v = 0; v < d; ++v) {
    if (collides[v]) continue;
    bool disjoint = true;
    for (std::size_t i = 0; i < f && disjoint; ++i) {
      disjoint = !used[chart.sigma[f_positions[i]](v)];
    }
    if (disjoint) {
      sets.packing.push_back(static_cast<std::uint32_t>(v));
      for (std::size_t i = 0; i < f; ++i) {
        used[chart.sigma[f_positions[i]](v)] = true;
      }
    }
  }

  const std::size_t outside = d - sets.collision_points.size();
  const std::size_t denom = f * f * delta_f;
  sets.packing_lower_bound = (outside + denom - 1) / denom;
  sets.packing_bound_ok = sets.packing.size() >= sets.packing_lower_bound;

  sets.cover_ok = true;
  for (std::size_t v = 0; v < d && sets.cover_ok; ++v) {
    if (collides[v]) continue;
    bool touched = false;
    for (std::size_t i = 0; i < f && !touched; ++i) {
      touched = used[chart.sigma[f_positions[i]](v)];
    }
    sets.cover_ok = touched;
  }
  return sets;
}

Beta0Result beta0(std::uint32_t alphabet, std::size_t f_size, std::size_t delta_f) {
  if (alphabet < 2 || f_size < 2 || delta_f < 1) {
    throw std::invalid_argument("beta0 needs |A| >= 2, |F| >= 2, Delta >= 1");
  }
  const double a = static_cast<double>(alphabet);
  const double miss = std::pow(a, -static_cast<double>(f_size));
  Beta0Result out;
  out.beta0 = -std::log1p(-miss) / std::log(a) /
              (2.0 * static_cast<double>(delta_f) * static_cast<double>(f_size * f_size));
  out.entropy_bound_nats = (1.0 - out.beta0) * std::log(a);
  return out;
}

double stirling_beta(const Rational& t) {
  if (t <= Rational(0) || t > Rational(1, 2)) {
    throw std::invalid_argument("stirling beta needs t in (0, 1/2]");
  }
  const double td = to_double(t);
  return -td * std::log(td) - (1.0 - td) * std::log1p(-td);
}

double stirling_bound(const Rational& t, std::size_t d) {
  if (t <= Rational(0) || t >= Rational(1, 2)) {
    throw std::invalid_argument("stirling bound needs t in (0, 1/2)");
  }
  if (d < 1) {
    throw std::invalid_argument("stirling bound needs d >= 1");
  }
  return std::exp(stirling_beta(t) * static_cast<double>(d));
}

BigInt binomial_tail(std::size_t d, std::size_t j_max) {
  BigInt sum = 0;
  BigInt binom = 1;  // C(d, 0)
  for (std::size_t j = 0; j <= std::min(j_max, d); ++j) {
    sum += binom;
    binom = binom * (d - j) / (j + 1);
  }
  return sum;
}

namespace {

/// Quality restricted to a subset of the element list: pairs from the subset,
/// products covered only when they land back inside it.
std::pair<Rational, Rational> quality_over(const Chart& chart, const Monoid& monoid,
                                           const std::vector<std::size_t>& positions) {
  std::vector<Element> parsed;
  parsed.reserve(positions.size());
  for (std::size_t p : positions) {
    parsed.push_back(monoid.parse(chart.elements[p]));
  }
  std::unordered_map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    at.emplace(chart.elements[positions[i]], positions[i]);
  }
  Rational defect(0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = 0; j < positions.size(); ++j) {
      const auto it = at.find(monoid.format(monoid.multiply(parsed[i], parsed[j])));
      if (it == at.end()) continue;
      defect = std::max(defect, hamming(chart.sigma[it->second],
                                        compose(chart.sigma[positions[i]],
                                                chart.sigma[positions[j]])));
    }
  }
  Rational separation(1);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      separation = std::min(separation,
                            hamming(chart.sigma[positions[i]], chart.sigma[positions[j]]));
    }
  }
  return {defect, separation};
}

}  // namespace

MonotonicityReport monotonicity_report(const SftSpec& sft, const Chart& chart,
                                       const Monoid& monoid, const Rational& delta,
                                       std::optional<Rational> eps) {
  validate_sft(sft);
  if (sft.is_full_shift()) {
    throw std::invalid_argument("monotonicity report requires a forbidden pattern");
  }
  MonotonicityReport report;
  report.delta = delta;

  std::vector<std::size_t> support;
  for (const auto& label : sft.forbidden[0].support) {
    const auto pos = chart.find_element(label);
    if (!pos.has_value()) {
      throw std::invalid_argument("forbidden support not in the chart: " + label);
    }
    support.push_back(*pos);
  }
  const std::size_t f = support.size();
  report.f_size = f;
  report.sm1_ok = chart.sigma[chart.identity_pos].is_identity();
  if (!report.sm1_ok) {
    report.unmet.push_back("SM1 violated");
  }
  if (f < 2) {
    report.unmet.push_back("support must have at least 2 elements");
  }
  const Rational delta_cap(1, 2 * static_cast<std::int64_t>(f + 1));
  if (delta <= Rational(0) || delta > delta_cap) {
    report.unmet.push_back("delta outside (0, 1/(2(|F|+1))]");
  }

  if (f >= 2) {
    const std::int64_t pairs = static_cast<std::int64_t>(f * (f - 1) / 2);
    report.eps_required = delta / pairs;
    const Rational eps_used = eps.value_or(report.eps_required);
    if (eps_used > report.eps_required) {
      report.unmet.push_back("eps above delta / C(|F|,2)");
    }
    const auto [sm2, sm3] = quality_over(chart, monoid, support);
    report.chart_eps = std::max(sm2, Rational(1) - sm3);
    if (report.chart_eps > eps_used) {
      report.unmet.push_back("chart quality over F is below the required eps");
    }
  }

  const InjectivitySets sets = injectivity_sets(chart, support);
  report.v_size = sets.collision_points.size();
  report.packing_size = sets.packing.size();
  report.delta_f = sets.delta_f;
  const std::int64_t d = static_cast<std::int64_t>(chart.carrier);
  report.v_bound_ok =
      BigInt(report.v_size) * delta.denominator() <= BigInt(delta.numerator()) * d;
  if (!report.v_bound_ok) {
    report.unmet.push_back("measured |V| exceeds delta * d");
  }
  if (!sets.packing_bound_ok || !sets.cover_ok) {
    report.unmet.push_back("packing bound failed");  // would indicate a bug
  }

  const double ln_a = std::log(static_cast<double>(sft.alphabet.size));
  report.log_full_count_nats = static_cast<double>(d) * ln_a;
  if (f >= 2 && sft.alphabet.size >= 2) {
    report.beta0_value = beta0(sft.alphabet.size, f, sets.delta_f).beta0;
    const Rational t = delta * static_cast<std::int64_t>(f + 1);
    if (t > Rational(0) && t <= Rational(1, 2)) {
      report.stirling_beta_value = stirling_beta(t);
      report.log_bound_nats =
          static_cast<double>(d) *
          (report.stirling_beta_value + (1.0 - report.beta0_value) * ln_a);
      report.certified_bound = std::exp(report.log_bound_nats);
    }
  }

  report.hypotheses_met = report.unmet.empty();
  return report;
}

std::string monotonicity_to_json(const MonotonicityReport& report) {
  nlohmann::json j;
  j["hypotheses_met"] = report.hypotheses_met;
  j["unmet"] = report.unmet;
  j["f_size"] = report.f_size;
  j["delta"] = to_string(report.delta);
  j["eps_required"] = to_string(report.eps_required);
  j["chart_eps"] = to_string(report.chart_eps);
  j["sm1_ok"] = report.sm1_ok;
  j["v_size"] = report.v_size;
  j["v_bound_ok"] = report.v_bound_ok;
  j["packing_size"] = report.packing_size;
  j["delta_f"] = report.delta_f;
  j["beta0"] = report.beta0_value;
  j["stirling_beta"] = report.stirling_beta_value;
  j["log_bound_nats"] = report.log_bound_nats;
  j["certified_bound"] = report.certified_bound;
  j["log_full_count_nats"] = report.log_full_count_nats;
  return j.dump(2);
}

// -- sweeps -------------------------------------------------------------------------

std::vector<std::size_t> resolve_f_labels(const Chart& chart,
                                          const std::vector<std::string>& f_labels) {
  std::vector<std::size_t> positions;
  positions.reserve(f_labels.size());
  for (const auto& label : f_labels) {
    const auto pos = chart.find_element(label);
    if (!pos.has_value()) {
      throw std::invalid_argument("F label not among chart elements: " + label);
    }
    positions.push_back(*pos);
  }
  return positions;
}

MonoidFragment experiment_fragment(const Chart& chart, const SftSpec& sft, MonoidPtr monoid,
                                   std::size_t radius) {
  if (auto finite = std::dynamic_pointer_cast<const FiniteMonoid>(monoid)) {
    return MonoidFragment::whole(finite);
  }
  std::vector<Element> generators;
  for (const auto& label : chart.elements) {
    generators.push_back(monoid->parse(label));
  }
  for (const auto& pattern : sft.forbidden) {
    for (const auto& label : pattern.support) {
      generators.push_back(monoid->parse(label));
    }
  }
  return MonoidFragment::close(monoid, generators, radius);
}

std::vector<SweepRow> entropy_sweep(const std::vector<Chart>& charts, const SftSpec& sft,
                                    const std::vector<std::string>& f_labels,
                                    const Rational& delta, const Rational& eps,
                                    const CountOptions& options) {
  std::vector<SweepRow> rows;
  rows.reserve(charts.size());
  for (const Chart& chart : charts) {
    SweepRow row;
    row.carrier = chart.carrier;
    try {
      const MonoidPtr monoid = make_monoid(chart.monoid_descriptor);
      GoodnessParams params;
      params.f_positions = resolve_f_labels(chart, f_labels);
      params.delta = delta;
      params.eps = eps;
      const MonoidFragment fragment = experiment_fragment(chart, sft, monoid);
      const CountResult result = count_good_traces(sft, params, chart, fragment, options);
      const EntropyEstimate est = entropy_estimate(result, chart.carrier, sft.alphabet.size);
      row.method = to_string(result.method);
      row.mode = to_string(result.mode);
      row.count = result.count;
      row.counted = true;
      row.log_per_d_nats = est.nats;
      row.log_per_d_base_a = est.base_a;
      if (!sft.is_full_shift()) {
        const MonotonicityReport report = monotonicity_report(sft, chart, *monoid, delta);
        if (report.hypotheses_met) {
          row.beta0_value = report.beta0_value;
          row.certified_upper_bound = report.certified_bound;
        }
      }
    } catch (const std::exception& err) {
      row.method = std::string("failed: ") + err.what();
      row.counted = false;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

}  // namespace

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "d,method,mode,count,log_count_per_d_nats,log_count_per_d_base_a,beta0,"
         "certified_upper_bound\n";
  for (const auto& row : rows) {
    out << row.carrier << "," << row.method << "," << row.mode << ",";
    if (row.counted) {
      out << row.count.str() << "," << format_double(row.log_per_d_nats) << ","
          << format_double(row.log_per_d_base_a);
    } else {
      out << ",,";
    }
    out << ",";
    if (row.beta0_value.has_value()) {
      out << format_double(*row.beta0_value);
    }
    out << ",";
    if (row.certified_upper_bound.has_value()) {
      out << format_double(*row.certified_upper_bound);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace soficlab
