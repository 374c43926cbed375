// soficlab command-line front end: chart construction and certification,
// cellular-automata checks on finite monoids, and per-chart entropy runs.
// Exit codes: 0 ok, 1 usage/validation, 2 hypotheses unmet, 3 cap exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "soficlab/chart.hpp"
#include "soficlab/entropy.hpp"
#include "soficlab/monoid.hpp"
#include "soficlab/prng.hpp"
#include "soficlab/shifts.hpp"

namespace {

using namespace soficlab;

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// "lo..hi" or a comma list.
std::vector<std::int64_t> parse_int_set(const std::string& text) {
  const auto dots = text.find("..");
  std::vector<std::int64_t> out;
  if (dots != std::string::npos) {
    const std::int64_t lo = std::stoll(text.substr(0, dots));
    const std::int64_t hi = std::stoll(text.substr(dots + 2));
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& piece : split_commas(text)) out.push_back(std::stoll(piece));
  return out;
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
  if (!path.has_value()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(*path);
  if (!out) {
    throw std::invalid_argument("cannot write file: " + *path);
  }
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

std::shared_ptr<const FiniteMonoid> load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return finite_monoid_from_json_text(buf.str());
}

struct EntropyArgs {
  std::string chart_path;
  std::string sft_path;
  std::string f_labels;
  std::string delta = "1/10";
  std::string eps = "1/2";
  std::string method = "exact";
  std::size_t samples = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t shards = 1;
  std::size_t cap = kDefaultTraceSpaceCap;
  std::optional<std::string> out;
};

void add_entropy_options(CLI::App* cmd, EntropyArgs& args, bool with_method) {
  cmd->add_option("--chart", args.chart_path, "chart JSON file")->required();
  cmd->add_option("--sft", args.sft_path, "SFT JSON file")->required();
  cmd->add_option("--F", args.f_labels, "comma-separated element labels for F")->required();
  cmd->add_option("--delta", args.delta, "defect tolerance, num/den");
  cmd->add_option("--eps", args.eps, "separation scale in (0,1), num/den");
  if (with_method) {
    cmd->add_option("--method", args.method, "exact | sampled | bound");
    cmd->add_option("--samples", args.samples, "sample count for sampled mode");
  }
  cmd->add_option("--seed", args.seed, "run seed");
  cmd->add_option("--shards", args.shards, "worker shards for exact counting");
  cmd->add_option("--cap", args.cap, "trace-space cap for exact counting");
  cmd->add_option("--out", args.out, "output path (stdout when omitted)");
}

CountOptions count_options_from(const EntropyArgs& args) {
  CountOptions options;
  if (args.method == "exact") {
    options.method = CountMethod::Exact;
  } else if (args.method == "sampled") {
    options.method = CountMethod::SampledLowerBound;
  } else if (args.method == "bound") {
    options.method = CountMethod::CombinatorialUpperBound;
  } else {
    throw std::invalid_argument("unknown method: " + args.method);
  }
  options.samples = args.samples;
  options.seed = args.seed;
  options.shards = args.shards == 0 ? 1 : args.shards;
  options.trace_space_cap = args.cap;
  return options;
}

int run_chart_build(const std::string& kind, std::size_t n, const std::string& k_spec,
                    std::uint64_t p, std::size_t d, std::size_t gens, std::size_t maxlen,
                    std::uint64_t seed, const std::string& charts_spec, const std::string& eps,
                    const std::string& base_chart, const std::string& extra,
                    const std::optional<std::string>& out) {
  Chart chart;
  if (kind == "cyclic") {
    chart = cyclic_chart(n, parse_int_set(k_spec));
  } else if (kind == "saturating") {
    std::vector<std::uint64_t> ks;
    for (std::int64_t v : parse_int_set(k_spec)) {
      if (v < 0) throw std::invalid_argument("saturating chart needs K in N");
      ks.push_back(static_cast<std::uint64_t>(v));
    }
    chart = saturating_chart(n, ks);
  } else if (kind == "poly") {
    std::vector<Polynomial> ks;
    for (const auto& piece : split_commas(k_spec)) {
      ks.push_back(poly_parse(piece));
    }
    chart = polynomial_chart(p, ks);
  } else if (kind == "random-perm") {
    chart = random_perm_chart(d, gens, maxlen, seed);
  } else if (kind == "product") {
    std::vector<Chart> parts;
    for (const auto& path : split_commas(charts_spec)) {
      parts.push_back(load_chart(path));
    }
    chart = product_chart(parts, parse_rational(eps));
  } else if (kind == "extend") {
    chart = extend_by_identity(load_chart(base_chart), split_commas(extra));
  } else {
    throw std::invalid_argument("unknown chart kind: " + kind);
  }
  write_output(out, chart_to_json(chart));
  return 0;
}

int run_chart_quality(const std::string& chart_path, const std::string& monoid_override,
                      const std::optional<std::string>& out) {
  const Chart chart = load_chart(chart_path);
  const std::string descriptor =
      monoid_override.empty() ? chart.monoid_descriptor : monoid_override;
  const MonoidPtr monoid = make_monoid(descriptor);
  const QualityReport report = quality(chart, *monoid);

  nlohmann::json j = nlohmann::json::parse(quality_to_json(report));
  nlohmann::json obstructions = nlohmann::json::array();
  for (std::size_t pos = 0; pos < chart.elements.size(); ++pos) {
    if (pos == chart.identity_pos) continue;
    const Element e = monoid->parse(chart.elements[pos]);
    if (monoid->format(monoid->multiply(e, e)) != chart.elements[pos]) continue;
    const ObstructionCertificate cert = idempotent_obstruction(chart, *monoid, pos);
    nlohmann::json c = nlohmann::json::parse(obstruction_to_json(cert));
    c["label"] = chart.elements[pos];
    obstructions.push_back(std::move(c));
  }
  j["obstructions"] = std::move(obstructions);

  std::cout << quality_verdict(report) << "\n";
  write_output(out, j.dump(2));
  return 0;
}

int run_search(std::size_t d, std::size_t iters, std::uint64_t seed, const std::string& budget,
               std::size_t shards, const std::optional<std::string>& out,
               const std::optional<std::string>& trace_out,
               const std::optional<std::string>& report_out) {
  const Rational sm2_budget = parse_rational(budget);
  SearchResult best_result = bicyclic_chart_search(d, iters, seed, sm2_budget);
  if (shards > 1) {
    // shard s gets seed+s and an equal slice of the iterations; merge keeps
    // the best objective, ties to the lowest shard index
    const std::size_t slice = iters / shards;
    best_result = bicyclic_chart_search(d, slice, seed, sm2_budget);
    for (std::size_t s = 1; s < shards; ++s) {
      SearchResult shard = bicyclic_chart_search(d, slice, seed + s, sm2_budget);
      const bool shard_feasible = shard.best_report.sm2_defect <= sm2_budget;
      const bool best_feasible = best_result.best_report.sm2_defect <= sm2_budget;
      const bool better =
          (shard_feasible && !best_feasible) ||
          (shard_feasible == best_feasible &&
           (shard_feasible
                ? shard.best_report.sm3_separation > best_result.best_report.sm3_separation
                : shard.best_report.sm2_defect < best_result.best_report.sm2_defect));
      if (better) {
        best_result = std::move(shard);
      }
    }
  }

  if (trace_out.has_value()) {
    std::ostringstream csv;
    csv << "iteration,sm2_defect,sm3_separation,improved\n";
    for (const auto& point : best_result.trace) {
      csv << point.iteration << "," << to_string(point.sm2_defect) << ","
          << to_string(point.sm3_separation) << "," << (point.improved ? 1 : 0) << "\n";
    }
    write_output(trace_out, csv.str());
  }
  if (report_out.has_value()) {
    write_output(report_out, quality_to_json(best_result.best_report));
  }
  std::cout << quality_verdict(best_result.best_report) << "\n";
  write_output(out, chart_to_json(best_result.best));
  return 0;
}

int run_entropy_estimate(const EntropyArgs& args) {
  const Chart chart = load_chart(args.chart_path);
  const SftSpec sft = load_sft(args.sft_path);
  const MonoidPtr monoid = make_monoid(chart.monoid_descriptor);

  GoodnessParams params;
  params.f_positions = resolve_f_labels(chart, split_commas(args.f_labels));
  params.delta = parse_rational(args.delta);
  params.eps = parse_rational(args.eps);
  const MonoidFragment fragment = experiment_fragment(chart, sft, monoid);
  const CountResult result =
      count_good_traces(sft, params, chart, fragment, count_options_from(args));
  const EntropyEstimate est = entropy_estimate(result, chart.carrier, sft.alphabet.size);

  SweepRow row;
  row.carrier = chart.carrier;
  row.method = to_string(result.method);
  row.mode = to_string(result.mode);
  row.count = result.count;
  row.counted = true;
  row.log_per_d_nats = est.nats;
  row.log_per_d_base_a = est.base_a;
  if (!sft.is_full_shift()) {
    const MonotonicityReport report = monotonicity_report(sft, chart, *monoid, params.delta);
    if (report.hypotheses_met) {
      row.beta0_value = report.beta0_value;
      row.certified_upper_bound = report.certified_bound;
    }
  }
  write_output(args.out, sweep_to_csv({row}));
  return 0;
}

int run_entropy_sweep(const EntropyArgs& args, const std::string& charts_spec,
                      const std::string& cyclic_spec, const std::string& k_spec) {
  std::vector<Chart> charts;
  if (!args.chart_path.empty()) charts.push_back(load_chart(args.chart_path));
  if (!charts_spec.empty()) {
    for (const auto& path : split_commas(charts_spec)) {
      charts.push_back(load_chart(path));
    }
  }
  if (!cyclic_spec.empty()) {
    const std::vector<std::int64_t> ks = parse_int_set(k_spec);
    for (std::int64_t n : parse_int_set(cyclic_spec)) {
      if (n < 1) throw std::invalid_argument("cyclic n must be >= 1");
      charts.push_back(cyclic_chart(static_cast<std::size_t>(n), ks));
    }
  }
  if (charts.empty()) {
    throw std::invalid_argument("sweep needs --chart, --charts or --cyclic");
  }
  const SftSpec sft = load_sft(args.sft_path);
  const std::vector<SweepRow> rows =
      entropy_sweep(charts, sft, split_commas(args.f_labels), parse_rational(args.delta),
                    parse_rational(args.eps), count_options_from(args));
  write_output(args.out, sweep_to_csv(rows));
  return 0;
}

int run_entropy_bound(const EntropyArgs& args) {
  const Chart chart = load_chart(args.chart_path);
  const SftSpec sft = load_sft(args.sft_path);
  const MonoidPtr monoid = make_monoid(chart.monoid_descriptor);
  const MonotonicityReport report =
      monotonicity_report(sft, chart, *monoid, parse_rational(args.delta),
                          args.eps.empty() ? std::nullopt
                                           : std::optional<Rational>(parse_rational(args.eps)));
  write_output(args.out, monotonicity_to_json(report));
  if (!report.hypotheses_met) {
    std::cerr << "hypotheses unmet\n";
    return 2;
  }
  return 0;
}

int run_monoid_idempotents(const std::string& table_path,
                           const std::optional<std::string>& out) {
  const auto monoid = load_table(table_path);
  nlohmann::json j;
  std::vector<std::size_t> nontrivial;
  for (std::size_t e = 0; e < monoid->order(); ++e) {
    if (e != monoid->identity_index() && monoid->mul(e, e) == e) {
      nontrivial.push_back(e);
    }
  }
  j["identity"] = monoid->identity_index();
  j["nontrivial_idempotents"] = nontrivial;
  const auto found = find_nontrivial_idempotent(*monoid);
  j["first_nontrivial"] = found.has_value() ? nlohmann::json(*found) : nlohmann::json(nullptr);
  // eventual-period derivation per non-invertible element
  nlohmann::json trace = nlohmann::json::array();
  for (std::size_t a = 0; a < monoid->order(); ++a) {
    bool invertible = false;
    for (std::size_t b = 0; b < monoid->order(); ++b) {
      if (monoid->mul(a, b) == monoid->identity_index() &&
          monoid->mul(b, a) == monoid->identity_index()) {
        invertible = true;
        break;
      }
    }
    if (invertible) continue;
    std::size_t current = a;
    std::size_t power = 1;
    std::vector<std::size_t> seen_at(monoid->order(), 0);
    std::size_t first = 0, period = 0;
    while (true) {
      if (seen_at[current] != 0) {
        first = seen_at[current] - 1;
        period = power - first;
        break;
      }
      seen_at[current] = power + 1;
      current = monoid->mul(current, a);
      ++power;
    }
    std::size_t idem = monoid->identity_index();
    for (std::size_t i = 0; i < first * period; ++i) idem = monoid->mul(idem, a);
    trace.push_back({{"element", a}, {"m", first}, {"t", period}, {"idempotent", idem}});
  }
  j["frobenius_trace"] = std::move(trace);
  write_output(out, j.dump(2));
  return 0;
}

int run_monoid_isgroup(const std::string& table_path, const std::optional<std::string>& out) {
  const auto monoid = load_table(table_path);
  const bool group = is_group(*monoid);
  nlohmann::json j;
  j["is_group"] = group;
  j["has_nontrivial_idempotent"] = find_nontrivial_idempotent(*monoid).has_value();
  std::cout << (group ? "true" : "false") << "\n";
  write_output(out, j.dump(2));
  return 0;
}

int run_monoid_ca_check(const std::string& table_path, std::uint32_t alphabet,
                        std::size_t max_memory, const std::optional<std::string>& out) {
  const auto monoid = load_table(table_path);
  const SurjunctivityResult result = surjunctivity_check(*monoid, alphabet, max_memory);
  nlohmann::json j;
  j["automata_checked"] = result.automata_checked;
  j["injective_count"] = result.injective_count;
  j["all_injective_surjective"] = result.all_injective_surjective;
  if (result.counterexample.has_value()) {
    j["counterexample"] = nlohmann::json::parse(ca_to_json(*result.counterexample));
  }
  std::cout << "all injective CAs surjective: "
            << (result.all_injective_surjective ? "true" : "false") << "\n";
  write_output(out, j.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soficlab: finite approximation charts, cellular automata over monoids, "
               "and per-chart sofic entropy estimates"};
  app.require_subcommand(1);

  // chart
  auto* chart_cmd = app.add_subcommand("chart", "build, certify and search charts");
  chart_cmd->require_subcommand(1);

  std::string kind, k_spec = "0", charts_spec, eps = "1/2", base_chart, extra;
  std::size_t n = 1, d = 1, gens = 1, maxlen = 1;
  std::uint64_t p = 2, seed = kDefaultSeed;
  std::optional<std::string> out_path;
  auto* build = chart_cmd->add_subcommand("build", "construct a chart");
  build->add_option("--kind", kind, "cyclic|saturating|poly|random-perm|product|extend")
      ->required();
  build->add_option("--n", n, "carrier size for cyclic/saturating");
  build->add_option("--K", k_spec, "element set: range lo..hi, comma list, or poly list");
  build->add_option("--p", p, "prime carrier for poly charts");
  build->add_option("--d", d, "carrier size for random-perm charts");
  build->add_option("--gens", gens, "generator count for random-perm charts");
  build->add_option("--maxlen", maxlen, "max word length for random-perm charts");
  build->add_option("--seed", seed, "seed for random-perm charts");
  build->add_option("--charts", charts_spec, "component chart files for product");
  build->add_option("--eps", eps, "target quality for product charts");
  build->add_option("--chart", base_chart, "base chart for extend");
  build->add_option("--extra", extra, "extra element labels for extend");
  build->add_option("--out", out_path, "output path");

  std::string quality_chart, monoid_override;
  std::optional<std::string> quality_out;
  auto* quality_cmd = chart_cmd->add_subcommand("quality", "measure (SM1)-(SM4)");
  quality_cmd->add_option("--chart", quality_chart, "chart JSON file")->required();
  quality_cmd->add_option("--monoid", monoid_override, "override the chart's monoid");
  quality_cmd->add_option("--out", quality_out, "report output path");

  std::size_t search_d = 10, search_iters = 1000, search_shards = 1;
  std::uint64_t search_seed = kDefaultSeed;
  std::string search_budget = "1/10";
  std::optional<std::string> search_out, search_trace, search_report;
  auto* search_cmd =
      chart_cmd->add_subcommand("search-bicyclic", "stress-test charts for the bicyclic monoid");
  search_cmd->add_option("--d", search_d, "carrier size");
  search_cmd->add_option("--iters", search_iters, "iteration count");
  search_cmd->add_option("--seed", search_seed, "search seed");
  search_cmd->add_option("--budget", search_budget, "sm2 defect budget, num/den");
  search_cmd->add_option("--shards", search_shards, "parallel searches (seed+shard)");
  search_cmd->add_option("--out", search_out, "best chart output path");
  search_cmd->add_option("--trace", search_trace, "per-iteration trace CSV path");
  search_cmd->add_option("--report", search_report, "best quality report path");

  // entropy
  auto* entropy_cmd = app.add_subcommand("entropy", "per-chart sofic entropy");
  entropy_cmd->require_subcommand(1);
  EntropyArgs est_args;
  auto* estimate = entropy_cmd->add_subcommand("estimate", "count good traces on one chart");
  add_entropy_options(estimate, est_args, true);

  EntropyArgs sweep_args;
  std::string sweep_charts, sweep_cyclic, sweep_k = "0";
  auto* sweep = entropy_cmd->add_subcommand("sweep", "one row per chart of a family");
  sweep->add_option("--chart", sweep_args.chart_path, "single chart JSON file");
  sweep->add_option("--charts", sweep_charts, "comma-separated chart files");
  sweep->add_option("--cyclic", sweep_cyclic, "cyclic chart sizes, e.g. 4,8,16 or 4..12");
  sweep->add_option("--K", sweep_k, "element set for the cyclic family");
  sweep->add_option("--sft", sweep_args.sft_path, "SFT JSON file")->required();
  sweep->add_option("--F", sweep_args.f_labels, "comma-separated element labels")->required();
  sweep->add_option("--delta", sweep_args.delta, "defect tolerance, num/den");
  sweep->add_option("--eps", sweep_args.eps, "separation scale, num/den");
  sweep->add_option("--method", sweep_args.method, "exact | sampled | bound");
  sweep->add_option("--samples", sweep_args.samples, "sample count for sampled mode");
  sweep->add_option("--seed", sweep_args.seed, "run seed");
  sweep->add_option("--shards", sweep_args.shards, "worker shards");
  sweep->add_option("--cap", sweep_args.cap, "trace-space cap");
  sweep->add_option("--out", sweep_args.out, "CSV output path");

  EntropyArgs bound_args;
  bound_args.eps.clear();
  auto* bound = entropy_cmd->add_subcommand("bound", "certified upper-bound report");
  bound->add_option("--chart", bound_args.chart_path, "chart JSON file")->required();
  bound->add_option("--sft", bound_args.sft_path, "SFT JSON file")->required();
  bound->add_option("--delta", bound_args.delta, "defect tolerance, num/den");
  bound->add_option("--eps", bound_args.eps, "quality level (defaults to delta/C(|F|,2))");
  bound->add_option("--out", bound_args.out, "report output path");

  // monoid
  auto* monoid_cmd = app.add_subcommand("monoid", "finite monoid table checks");
  monoid_cmd->require_subcommand(1);
  std::string idem_table, isgroup_table, ca_table;
  std::optional<std::string> idem_out, isgroup_out, ca_out;
  std::uint32_t ca_alphabet = 2;
  std::size_t ca_max_memory = 2;
  auto* idem = monoid_cmd->add_subcommand("idempotents", "list idempotents with derivations");
  idem->add_option("--table", idem_table, "finite monoid JSON table")->required();
  idem->add_option("--out", idem_out, "output path");
  auto* isgroup = monoid_cmd->add_subcommand("isgroup", "two-sided invertibility check");
  isgroup->add_option("--table", isgroup_table, "finite monoid JSON table")->required();
  isgroup->add_option("--out", isgroup_out, "output path");
  auto* ca_check = monoid_cmd->add_subcommand("ca-check", "exhaustive surjunctivity sweep");
  ca_check->add_option("--table", ca_table, "finite monoid JSON table")->required();
  ca_check->add_option("--alphabet", ca_alphabet, "alphabet size");
  ca_check->add_option("--max-memory", ca_max_memory, "max memory-set size");
  ca_check->add_option("--out", ca_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (build->parsed()) {
      return run_chart_build(kind, n, k_spec, p, d, gens, maxlen, seed, charts_spec, eps,
                             base_chart, extra, out_path);
    }
    if (quality_cmd->parsed()) {
      return run_chart_quality(quality_chart, monoid_override, quality_out);
    }
    if (search_cmd->parsed()) {
      return run_search(search_d, search_iters, search_seed, search_budget, search_shards,
                        search_out, search_trace, search_report);
    }
    if (estimate->parsed()) {
      return run_entropy_estimate(est_args);
    }
    if (sweep->parsed()) {
      return run_entropy_sweep(sweep_args, sweep_charts, sweep_cyclic, sweep_k);
    }
    if (bound->parsed()) {
      return run_entropy_bound(bound_args);
    }
    if (idem->parsed()) {
      return run_monoid_idempotents(idem_table, idem_out);
    }
    if (isgroup->parsed()) {
      return run_monoid_isgroup(isgroup_table, isgroup_out);
    }
    if (ca_check->parsed()) {
      return run_monoid_ca_check(ca_table, ca_alphabet, ca_max_memory, ca_out);
    }
  } catch (const HypothesesUnmetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
