// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion pins its tolerances in code and carries its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "soficlab/chart.hpp"
#include "soficlab/entropy.hpp"
#include "soficlab/monoid.hpp"
#include "soficlab/prng.hpp"
#include "soficlab/shifts.hpp"
#include "soficlab/transformation.hpp"

using namespace soficlab;

namespace {

struct Criterion {
  int number;
  std::string name;
  double time_limit_seconds;
  std::function<bool(std::string&)> run;
};

SftSpec full_shift(std::uint32_t a) {
  SftSpec sft;
  sft.alphabet.size = a;
  return sft;
}

SftSpec golden_mean() {
  SftSpec sft;
  sft.alphabet.size = 2;
  sft.forbidden.push_back({{"0", "1"}, {1, 1}});
  return sft;
}

struct Instance {
  Chart chart;
  SftSpec sft;
  GoodnessParams params;
  TraceContext ctx;
};

Chart random_chart(Rng& rng, std::size_t d, std::size_t k) {
  Chart chart;
  chart.carrier = d;
  chart.monoid_descriptor = "int-add";
  for (std::size_t e = 0; e < k; ++e) {
    chart.elements.push_back(std::to_string(e));
    chart.sigma.emplace_back(random_image(rng, d));
  }
  chart.identity_pos = 0;
  validate_chart(chart);
  return chart;
}

SftSpec random_sft(Rng& rng, std::uint32_t a, std::size_t k) {
  SftSpec sft;
  sft.alphabet.size = a;
  const std::size_t patterns = 1 + uniform_below(rng, 2);
  for (std::size_t i = 0; i < patterns; ++i) {
    LabeledPattern p;
    const std::size_t support_size = 1 + uniform_below(rng, std::min<std::size_t>(k, 2));
    std::set<std::size_t> support;
    while (support.size() < support_size) {
      support.insert(uniform_below(rng, k));
    }
    for (std::size_t s : support) {
      p.support.push_back(std::to_string(s));
      p.values.push_back(static_cast<std::uint32_t>(uniform_below(rng, a)));
    }
    sft.forbidden.push_back(std::move(p));
  }
  return sft;
}

/// Random chart + SFT + params with a nonempty local language.
Instance random_instance(Rng& rng, std::size_t max_d, std::uint32_t max_a,
                         const Rational& delta) {
  while (true) {
    const std::size_t d = 2 + uniform_below(rng, max_d - 1);
    const std::uint32_t a = 2 + static_cast<std::uint32_t>(uniform_below(rng, max_a - 1));
    const std::size_t k = 2 + uniform_below(rng, 2);
    Instance inst{random_chart(rng, d, k), random_sft(rng, a, k), {}, {}};
    for (std::size_t e = 0; e < k; ++e) {
      inst.params.f_positions.push_back(e);
    }
    inst.params.delta = delta;
    const MonoidFragment fragment =
        experiment_fragment(inst.chart, inst.sft, make_monoid("int-add"));
    inst.ctx = make_trace_context(inst.chart, inst.sft, inst.params, fragment,
                                  AdmissibilityMode::LocalApproximate);
    if (!inst.ctx.language.empty()) {
      return inst;
    }
  }
}

BigInt oracle_count(const Instance& inst) {
  std::vector<std::vector<std::uint32_t>> images;
  for (const auto& t : inst.ctx.f_sigma) {
    images.emplace_back(t.image().begin(), t.image().end());
  }
  return testing::naive_trace_count(inst.ctx.language, images, inst.ctx.f_window_index,
                                    inst.ctx.carrier,
                                    defect_budget(inst.params.delta, inst.ctx.carrier));
}

// 1. full-shift entropy equality on cyclic charts
bool criterion_full_shift(std::string& detail) {
  const SftSpec sft = full_shift(2);
  const MonoidPtr monoid = make_monoid("int-add");
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    const Chart chart = cyclic_chart(n, {-1, 0, 1});
    GoodnessParams params;
    params.f_positions = resolve_f_labels(chart, {"-1", "0", "1"});
    params.delta = Rational(1, 10);
    const MonoidFragment fragment = experiment_fragment(chart, sft, monoid);
    const CountResult result = count_good_traces(sft, params, chart, fragment);
    if (result.count != BigInt(1) << n) {
      detail = "count mismatch at n=" + std::to_string(n);
      return false;
    }
    const EntropyEstimate est = entropy_estimate(result, n, 2);
    if (est.nats != std::log(2.0) || est.base_a != 1.0) {
      detail = "estimate not exactly log 2 at n=" + std::to_string(n);
      return false;
    }
  }
  return true;
}

// 2. subshift counts never exceed |A|^|D|
bool criterion_subshift_bound(std::string& detail) {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const Rational delta = uniform_below(rng, 2) == 0 ? Rational(1, 10) : Rational(1, 3);
    const Instance inst = random_instance(rng, 12, 3, delta);
    BigInt cap = 1;
    for (std::size_t v = 0; v < inst.ctx.carrier; ++v) cap *= inst.ctx.alphabet;
    const BigInt count = count_good_traces_dfs(inst.params, inst.ctx);
    if (count > cap) {
      detail = "count exceeded |A|^d on trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

// 3. strict drop for the golden mean with a certified bound
bool criterion_strict_drop(std::string& detail) {
  const MonoidPtr monoid = make_monoid("int-add");
  const SftSpec sft = golden_mean();
  const Rational delta(1, 1000);  // floor(delta^2 n) = 0 for every n here
  for (std::size_t n = 4; n <= 12; ++n) {
    const Chart chart = cyclic_chart(n, {0, 1});
    GoodnessParams params;
    params.f_positions = resolve_f_labels(chart, {"0", "1"});
    params.delta = delta;
    const MonoidFragment fragment = experiment_fragment(chart, sft, monoid);
    const BigInt full = BigInt(1) << n;
    const TraceContext ctx = make_trace_context(chart, sft, params, fragment,
                                                AdmissibilityMode::LocalApproximate);
    const BigInt exact = count_good_traces_dfs(params, ctx);
    if (exact >= full) {
      detail = "no strict drop at n=" + std::to_string(n);
      return false;
    }
    const MonotonicityReport report = monotonicity_report(sft, chart, *monoid, delta);
    if (!report.hypotheses_met) {
      detail = "hypotheses unexpectedly unmet at n=" + std::to_string(n);
      return false;
    }
    if (!(report.certified_bound < static_cast<double>(full))) {
      detail = "certified bound not below 2^n at n=" + std::to_string(n);
      return false;
    }
    if (static_cast<double>(exact) > report.certified_bound) {
      detail = "exact count above the certified bound at n=" + std::to_string(n);
      return false;
    }
  }
  return true;
}

// 4. exact DFS equals naive enumeration
bool criterion_oracle_equivalence(std::string& detail) {
  Rng rng(103);
  int done = 0;
  int big = 0;
  while (done < 100) {
    const Rational delta = uniform_below(rng, 2) == 0 ? Rational(1, 10) : Rational(1, 2);
    Instance inst = random_instance(rng, 10, 3, delta);
    double space = 1;
    for (std::size_t v = 0; v < inst.ctx.carrier; ++v) {
      space *= static_cast<double>(inst.ctx.language.size());
    }
    if (space < 1e3 || space > 1e6) continue;  // keep instances non-trivial
    if (space > 1e5) {
      if (big >= 10) continue;  // a handful of near-cap instances, not all
      ++big;
    }
    if (count_good_traces_dfs(inst.params, inst.ctx) != oracle_count(inst)) {
      detail = "DFS/oracle mismatch on instance " + std::to_string(done);
      return false;
    }
    ++done;
  }
  return true;
}

// 5. Hamming product formula
bool criterion_hamming_product(std::string& detail) {
  Rng rng(105);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 3);
    std::vector<Transformation> fs, gs;
    Rational complement(1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = 1 + uniform_below(rng, 6);
      fs.emplace_back(random_image(rng, d));
      gs.emplace_back(random_image(rng, d));
      complement *= Rational(1) - hamming(fs[i], gs[i]);
    }
    // brute-force disagreement count on the product carrier vs the formula
    if (hamming(product_embed(fs), product_embed(gs)) != Rational(1) - complement) {
      detail = "formula mismatch on trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

// 6. idempotent obstruction pigeonhole
bool criterion_obstruction(std::string& detail) {
  Rng rng(107);
  int done = 0;
  while (done < 1000) {
    const std::size_t d = 2 + uniform_below(rng, 999);
    const Transformation f(random_image(rng, d));
    const FiberWitness w = idempotent_fiber_witness(f);
    if (w.settling_count == 0) continue;
    if (!w.point.has_value()) {
      detail = "missing witness despite settling points";
      return false;
    }
    std::size_t fiber = 0;
    for (std::size_t v = 0; v < d; ++v) {
      if (f(v) == *w.point) ++fiber;
    }
    const std::size_t bound =
        (w.settling_count + w.fixed_count - 1) / w.fixed_count;
    if (fiber != w.fiber_size || fiber < bound) {
      detail = "pigeonhole bound missed at d=" + std::to_string(d);
      return false;
    }
    ++done;
  }
  return true;
}

// 7. polynomial chart guarantees
bool criterion_polynomial_charts(std::string& detail) {
  const std::vector<std::uint64_t> primes{2,   3,   5,   7,   11,  13,  17,  31,
                                          61,  101, 127, 151, 199, 251, 257};
  Rng rng(109);
  int done = 0;
  while (done < 150) {
    const std::uint64_t p = primes[uniform_below(rng, primes.size())];
    std::vector<Polynomial> ks;
    // the root-count bound needs every member distinct and non-constant mod p;
    // keys are reduced coefficient vectors with trailing zeros stripped, and
    // the chart's identity polynomial X is claimed up front
    std::set<std::vector<std::uint64_t>> seen_mod_p{{0, 1}};
    bool degenerate = false;
    const std::size_t members = 2 + uniform_below(rng, 3);
    int attempts = 0;
    while (ks.size() < members && !degenerate) {
      if (++attempts > 200) {
        degenerate = true;  // tiny prime, no room for distinct members
        break;
      }
      const int degree = 1 + static_cast<int>(uniform_below(rng, 4));
      std::vector<BigInt> coeffs(degree + 1);
      for (int i = 0; i <= degree; ++i) {
        coeffs[i] = static_cast<std::int64_t>(uniform_below(rng, 11)) - 5;
      }
      if (coeffs.back() == 0) coeffs.back() = 1;
      const Polynomial poly(coeffs);
      std::vector<std::uint64_t> key;
      for (const BigInt& c : poly.coeffs) {
        BigInt r = c % BigInt(p);
        if (r < 0) r += p;
        key.push_back(static_cast<std::uint64_t>(r));
      }
      while (!key.empty() && key.back() == 0) key.pop_back();
      if (key.size() < 2 || !seen_mod_p.insert(key).second) continue;
      ks.push_back(poly);
    }
    if (degenerate) continue;
    std::size_t max_degree = 1;
    for (const auto& poly : ks) {
      max_degree = std::max<std::size_t>(max_degree, poly.degree());
    }
    const Chart chart = polynomial_chart(p, ks);
    const QualityReport report = quality(chart, *make_monoid("polyZ"));
    if (report.sm4_delta > max_degree) {
      detail = "fiber above max degree at p=" + std::to_string(p);
      return false;
    }
    if (report.sm3_separation <
        Rational(1) - Rational(static_cast<std::int64_t>(max_degree),
                               static_cast<std::int64_t>(p))) {
      detail = "separation below 1 - Delta/p at p=" + std::to_string(p);
      return false;
    }
    ++done;
  }
  return true;
}

// 8. Stirling tail bound
bool criterion_stirling(std::string& detail) {
  for (int grid = 1; grid <= 9; ++grid) {
    const Rational t(grid, 20);  // 0.05, 0.10, ..., 0.45
    for (std::size_t d = 1; d <= 200; ++d) {
      const double bound = stirling_bound(t, d);
      const BigInt tail = binomial_tail(d, static_cast<std::size_t>(floor_times(t, d)));
      if (static_cast<double>(tail) > bound) {
        detail = "tail above bound at t=" + to_string(t) + ", d=" + std::to_string(d);
        return false;
      }
    }
  }
  return true;
}

// 9. finite-scale surjunctivity and the group criterion
bool criterion_finite_monoids(std::string& detail) {
  const std::vector<std::size_t> expected_counts{1, 2, 7};
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto tables = testing::monoids_up_to_iso(n);
    if (tables.size() != expected_counts[n - 1]) {
      detail = "monoid enumeration off at order " + std::to_string(n);
      return false;
    }
    for (const auto& table : tables) {
      const FiniteMonoid m(n, table);
      const SurjunctivityResult check = surjunctivity_check(m, 2, 2);
      if (!check.all_injective_surjective) {
        detail = "injective CA without surjectivity at order " + std::to_string(n);
        return false;
      }
      if (is_group(m) == find_nontrivial_idempotent(m).has_value()) {
        detail = "group criterion failed at order " + std::to_string(n);
        return false;
      }
    }
  }
  return true;
}

// 10. counts agree at eps = 1/4 and eps = 3/4
bool criterion_eps_independence(std::string& detail) {
  const MonoidPtr monoid = make_monoid("int-add");
  auto counts_agree = [&](const Chart& chart, const SftSpec& sft,
                          const std::vector<std::string>& f_labels, const Rational& delta) {
    GoodnessParams params;
    params.f_positions = resolve_f_labels(chart, f_labels);
    params.delta = delta;
    const MonoidFragment fragment = experiment_fragment(chart, sft, monoid);
    params.eps = Rational(1, 4);
    const CountResult low = count_good_traces(sft, params, chart, fragment);
    params.eps = Rational(3, 4);
    const CountResult high = count_good_traces(sft, params, chart, fragment);
    return low.count == high.count;
  };
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    if (!counts_agree(cyclic_chart(n, {-1, 0, 1}), full_shift(2), {"-1", "0", "1"},
                      Rational(1, 10))) {
      detail = "full-shift counts differ across eps at n=" + std::to_string(n);
      return false;
    }
  }
  for (std::size_t n = 4; n <= 12; ++n) {
    if (!counts_agree(cyclic_chart(n, {0, 1}), golden_mean(), {"0", "1"},
                      Rational(1, 1000))) {
      detail = "golden-mean counts differ across eps at n=" + std::to_string(n);
      return false;
    }
  }
  Rng rng(113);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(rng, 9, 3, Rational(1, 10));
    GoodnessParams params = inst.params;
    const MonoidFragment fragment = experiment_fragment(inst.chart, inst.sft, monoid);
    params.eps = Rational(1, 4);
    const CountResult low = count_good_traces(inst.sft, params, inst.chart, fragment);
    params.eps = Rational(3, 4);
    const CountResult high = count_good_traces(inst.sft, params, inst.chart, fragment);
    if (low.count != high.count) {
      detail = "random instance counts differ across eps, trial " + std::to_string(trial);
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "full-shift entropy equality (count 2^n, estimate log 2)", 1.0,
       criterion_full_shift},
      {2, "subshift counts bounded by |A|^d (50 randomized instances)", 60.0,
       criterion_subshift_bound},
      {3, "strict entropy drop for the golden mean with certified bounds", 300.0,
       criterion_strict_drop},
      {4, "exact DFS equals naive enumeration (100 randomized instances)", 600.0,
       criterion_oracle_equivalence},
      {5, "Hamming product formula, 1000 random tuples, exact", 10.0,
       criterion_hamming_product},
      {6, "idempotent fiber pigeonhole, 1000 random transformations", 10.0,
       criterion_obstruction},
      {7, "polynomial chart separation and fiber guarantees", 30.0,
       criterion_polynomial_charts},
      {8, "Stirling bound dominates exact binomial tails", 5.0, criterion_stirling},
      {9, "surjunctivity and group criterion over all monoids of order <= 3", 600.0,
       criterion_finite_monoids},
      {10, "counts independent of eps within (0,1)", 600.0, criterion_eps_independence},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && seconds > criterion.time_limit_seconds) {
      ok = false;
      detail = "runtime over budget";
    }
    std::printf("[%s] criterion %2d: %s (%.2fs%s)\n", ok ? "PASS" : "FAIL",
                criterion.number, criterion.name.c_str(), seconds,
                detail.empty() ? "" : (std::string("; ") + detail).c_str());
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
