#include "soficlab/chart.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "soficlab/prng.hpp"

namespace soficlab {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  for (std::uint64_t d = 3; d * d <= p; d += 2) {
    if (p % d == 0) return false;
  }
  return true;
}

std::int64_t coeff_mod(const BigInt& c, std::uint64_t p) {
  BigInt r = c % BigInt(p);
  if (r < 0) r += p;
  return static_cast<std::int64_t>(r);
}

}  // namespace

std::optional<std::size_t> Chart::find_element(std::string_view label) const {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] == label) return i;
  }
  return std::nullopt;
}

void validate_chart(const Chart& chart) {
  if (chart.carrier == 0) {
    throw std::invalid_argument("chart carrier must be nonempty");
  }
  if (chart.elements.empty() || chart.elements.size() != chart.sigma.size()) {
    throw std::invalid_argument("chart needs one transformation per element");
  }
  if (chart.identity_pos >= chart.elements.size()) {
    throw std::invalid_argument("chart identity position out of range");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : chart.elements) {
    if (!seen.insert(label).second) {
      throw std::invalid_argument("chart has duplicate element: " + label);
    }
  }
  for (const auto& t : chart.sigma) {
    if (t.carrier() != chart.carrier) {
      throw std::invalid_argument("chart transformation carrier mismatch");
    }
  }
  const MonoidPtr monoid = make_monoid(chart.monoid_descriptor);
  if (monoid->format(monoid->identity()) != chart.elements[chart.identity_pos]) {
    throw std::invalid_argument("chart identity position does not name the identity");
  }
  for (const auto& label : chart.elements) {
    monoid->parse(label);  // throws on a label outside the monoid
  }
}

// -- quality -----------------------------------------------------------------

QualityReport quality(const Chart& chart, const Monoid& monoid) {
  const std::size_t k = chart.elements.size();
  std::vector<Element> parsed;
  parsed.reserve(k);
  for (const auto& label : chart.elements) {
    parsed.push_back(monoid.parse(label));
  }
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < k; ++i) {
    position.emplace(chart.elements[i], i);
  }

  QualityReport report;
  report.sm1_ok = chart.sigma[chart.identity_pos].is_identity();

  std::int64_t covered = 0;
  Rational worst_defect(0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::string product = monoid.format(monoid.multiply(parsed[i], parsed[j]));
      const auto it = position.find(product);
      if (it == position.end()) continue;
      ++covered;
      const Rational defect =
          hamming(chart.sigma[it->second], compose(chart.sigma[i], chart.sigma[j]));
      worst_defect = std::max(worst_defect, defect);
    }
  }
  report.sm2_defect = worst_defect;
  report.sm2_coverage = Rational(covered, static_cast<std::int64_t>(k * k));

  Rational separation(1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      separation = std::min(separation, hamming(chart.sigma[i], chart.sigma[j]));
    }
  }
  report.sm3_separation = separation;

  std::size_t delta = 1;
  for (const auto& t : chart.sigma) {
    delta = std::max(delta, max_fiber(t));
  }
  report.sm4_delta = delta;

  // positive separation makes sigma injective on K, so K fits inside Map(D)
  report.carrier_growth_ok = true;
  if (report.sm3_separation > Rational(0) && chart.carrier <= 64) {
    BigInt cap = 1;
    for (std::size_t i = 0; i < chart.carrier; ++i) {
      cap *= chart.carrier;
    }
    report.carrier_growth_ok = BigInt(k) <= cap;
  }
  return report;
}

std::string quality_to_json(const QualityReport& report) {
  nlohmann::json j;
  j["sm1_ok"] = report.sm1_ok;
  j["sm2_defect"] = to_string(report.sm2_defect);
  j["sm2_coverage"] = to_string(report.sm2_coverage);
  j["sm3_separation"] = to_string(report.sm3_separation);
  j["sm4_delta"] = report.sm4_delta;
  j["carrier_growth_ok"] = report.carrier_growth_ok;
  return j.dump(2);
}

std::string quality_verdict(const QualityReport& report) {
  const Rational eps = std::max(report.sm2_defect, Rational(1) - report.sm3_separation);
  std::string head = report.sm1_ok ? "(SM1-SM4)" : "SM1 violated; (SM2-SM4)";
  return head + " at (eps=" + to_string(eps) + ", Delta=" + std::to_string(report.sm4_delta) +
         ") with SM2 coverage " + to_string(report.sm2_coverage);
}

// -- constructors ------------------------------------------------------------

Chart cyclic_chart(std::size_t n, const std::vector<std::int64_t>& ks) {
  if (n == 0) {
    throw std::invalid_argument("cyclic chart needs n >= 1");
  }
  std::vector<std::int64_t> members = ks;
  if (std::find(members.begin(), members.end(), 0) == members.end()) {
    members.push_back(0);
  }
  Chart chart;
  chart.carrier = n;
  chart.monoid_descriptor = "int-add";
  for (std::int64_t m : members) {
    chart.elements.push_back(std::to_string(m));
    std::vector<std::uint32_t> image(n);
    for (std::size_t v = 0; v < n; ++v) {
      const std::int64_t w = ((static_cast<std::int64_t>(v) + m) % static_cast<std::int64_t>(n) +
                              static_cast<std::int64_t>(n)) %
                             static_cast<std::int64_t>(n);
      image[v] = static_cast<std::uint32_t>(w);
    }
    chart.sigma.emplace_back(std::move(image));
  }
  chart.identity_pos = *chart.find_element("0");
  validate_chart(chart);
  return chart;
}

Chart saturating_chart(std::size_t n, const std::vector<std::uint64_t>& ks) {
  std::vector<std::uint64_t> members = ks;
  if (std::find(members.begin(), members.end(), 0u) == members.end()) {
    members.push_back(0);
  }
  for (std::uint64_t m : members) {
    if (m >= n) {
      throw std::invalid_argument("saturating chart needs n > max(K)");
    }
  }
  Chart chart;
  chart.carrier = n;
  chart.monoid_descriptor = "nat-add";
  for (std::uint64_t m : members) {
    chart.elements.push_back(std::to_string(m));
    std::vector<std::uint32_t> image(n);
    for (std::size_t v = 0; v < n; ++v) {
      image[v] = static_cast<std::uint32_t>(std::min<std::uint64_t>(v + m, n - 1));
    }
    chart.sigma.emplace_back(std::move(image));
  }
  chart.identity_pos = *chart.find_element("0");
  validate_chart(chart);
  return chart;
}

Chart polynomial_chart(std::uint64_t p, const std::vector<Polynomial>& ks) {
  if (!is_prime(p)) {
    throw std::invalid_argument("polynomial chart needs a prime carrier size");
  }
  std::vector<Polynomial> members;
  const Polynomial x({BigInt(0), BigInt(1)});
  if (std::find(ks.begin(), ks.end(), x) == ks.end()) {
    members.push_back(x);
  }
  members.insert(members.end(), ks.begin(), ks.end());
  Chart chart;
  chart.carrier = static_cast<std::size_t>(p);
  chart.monoid_descriptor = "polyZ";
  for (const Polynomial& poly : members) {
    if (poly.is_constant()) {
      throw std::invalid_argument("constant polynomial rejected: " + poly_to_string(poly));
    }
    chart.elements.push_back(poly_to_string(poly));
    std::vector<std::int64_t> reduced(poly.coeffs.size());
    for (std::size_t i = 0; i < poly.coeffs.size(); ++i) {
      reduced[i] = coeff_mod(poly.coeffs[i], p);
    }
    std::vector<std::uint32_t> image(p);
    for (std::uint64_t a = 0; a < p; ++a) {
      std::uint64_t acc = 0;
      for (std::size_t i = reduced.size(); i-- > 0;) {
        acc = (acc * a + static_cast<std::uint64_t>(reduced[i])) % p;
      }
      image[a] = static_cast<std::uint32_t>(acc);
    }
    chart.sigma.emplace_back(std::move(image));
  }
  chart.identity_pos = *chart.find_element("X");
  validate_chart(chart);
  return chart;
}

Chart random_perm_chart(std::size_t d, std::size_t generator_count, std::size_t maxlen,
                        std::uint64_t seed) {
  if (d == 0 || generator_count == 0 || maxlen == 0) {
    throw std::invalid_argument("random_perm_chart needs d, k, L >= 1");
  }
  const MonoidPtr monoid = make_monoid("free:" + std::to_string(generator_count));
  Rng rng(seed);
  std::vector<Transformation> generator_maps;
  generator_maps.reserve(generator_count);
  for (std::size_t g = 0; g < generator_count; ++g) {
    generator_maps.emplace_back(random_permutation(rng, d));
  }
  std::vector<Element> generators;
  for (std::size_t g = 0; g < generator_count; ++g) {
    generators.push_back(monoid->parse(std::string(1, static_cast<char>('a' + g))));
  }
  const MonoidFragment words = MonoidFragment::close(monoid, generators, maxlen);

  Chart chart;
  chart.carrier = d;
  chart.monoid_descriptor = monoid->descriptor();
  chart.seed = seed;
  std::vector<Transformation> sigma;
  sigma.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& label = words.label(i);
    chart.elements.push_back(label);
    if (i == words.identity_pos()) {
      sigma.push_back(Transformation::identity(d));
      continue;
    }
    // words are closed under prefixes in BFS order, so compose incrementally
    Transformation image = generator_maps[label[0] - 'a'];
    for (std::size_t c = 1; c < label.size(); ++c) {
      image = compose(image, generator_maps[label[c] - 'a']);
    }
    sigma.push_back(std::move(image));
  }
  chart.sigma = std::move(sigma);
  chart.identity_pos = words.identity_pos();
  validate_chart(chart);
  return chart;
}

std::size_t carrier_cap_from_env() {
  if (const char* raw = std::getenv("SOFICLAB_CARRIER_CAP")) {
    const long long v = std::atoll(raw);
    if (v > 0) {
      return static_cast<std::size_t>(v);
    }
  }
  return kDefaultCarrierCap;
}

Chart product_chart(const std::vector<Chart>& parts, const Rational& eps,
                    std::size_t carrier_cap) {
  if (parts.empty()) {
    throw std::invalid_argument("product chart needs at least one factor");
  }
  if (eps <= Rational(0) || eps >= Rational(1)) {
    throw std::invalid_argument("product chart eps must lie in (0,1)");
  }
  const std::size_t k = parts[0].elements.size();
  for (const Chart& part : parts) {
    if (part.elements.size() != k || part.identity_pos != parts[0].identity_pos) {
      throw std::invalid_argument("product chart factors must align on a common K");
    }
  }
  std::size_t carrier = 1;
  for (const Chart& part : parts) {
    if (carrier > carrier_cap / part.carrier) {
      throw CapExceededError("product carrier exceeds cap " + std::to_string(carrier_cap));
    }
    carrier *= part.carrier;
  }

  Chart chart;
  chart.carrier = carrier;
  std::string descriptor = "product(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) descriptor += ",";
    descriptor += parts[i].monoid_descriptor;
  }
  chart.monoid_descriptor = descriptor + ")";
  chart.identity_pos = parts[0].identity_pos;

  for (std::size_t e = 0; e < k; ++e) {
    std::string label = "(";
    std::vector<Transformation> factors;
    factors.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) label += "|";
      label += parts[i].elements[e];
      factors.push_back(parts[i].sigma[e]);
    }
    chart.elements.push_back(label + ")");
    Transformation embedded = product_embed(factors);
    std::size_t fiber_product = 1;
    for (const auto& f : factors) {
      fiber_product *= max_fiber(f);
    }
    if (max_fiber(embedded) != fiber_product) {
      throw std::logic_error("product fiber must be the product of component fibers");
    }
    chart.sigma.push_back(std::move(embedded));
  }
  validate_chart(chart);

  // measured defect must respect the product formula bound
  Rational combined_complement(1);
  for (const Chart& part : parts) {
    const QualityReport part_report = quality(part, *make_monoid(part.monoid_descriptor));
    combined_complement *= Rational(1) - part_report.sm2_defect;
  }
  const QualityReport report = quality(chart, *make_monoid(chart.monoid_descriptor));
  if (report.sm2_defect > Rational(1) - combined_complement) {
    throw std::logic_error("product defect exceeded the product-formula bound");
  }
  return chart;
}

Chart extend_by_identity(const Chart& chart, const std::vector<std::string>& extra) {
  Chart out = chart;
  const MonoidPtr monoid = make_monoid(chart.monoid_descriptor);
  for (const auto& label : extra) {
    if (out.find_element(label).has_value()) {
      throw std::invalid_argument("extend_by_identity: duplicate element " + label);
    }
    monoid->parse(label);
    out.elements.push_back(label);
    out.sigma.push_back(Transformation::identity(chart.carrier));
  }
  validate_chart(out);
  return out;
}

// -- obstruction certificate --------------------------------------------------

ObstructionCertificate idempotent_obstruction(const Chart& chart, const Monoid& monoid,
                                              std::size_t element_pos) {
  if (element_pos >= chart.elements.size()) {
    throw std::invalid_argument("obstruction element out of range");
  }
  const Element e = monoid.parse(chart.elements[element_pos]);
  if (monoid.format(monoid.multiply(e, e)) != chart.elements[element_pos]) {
    throw std::invalid_argument("element is not idempotent: " + chart.elements[element_pos]);
  }
  if (element_pos == chart.identity_pos) {
    throw std::invalid_argument("obstruction needs a non-trivial idempotent");
  }

  const Transformation& f = chart.sigma[element_pos];
  const FiberWitness w = idempotent_fiber_witness(f);
  ObstructionCertificate cert;
  cert.element_pos = element_pos;
  cert.witness_point = w.point;
  cert.witness_fiber = w.fiber_size;
  cert.fixed_count = w.fixed_count;
  cert.settling_count = w.settling_count;
  cert.implied_delta = std::max<std::size_t>(1, w.pigeonhole_bound());
  const auto d = static_cast<std::int64_t>(chart.carrier);
  cert.sm2_mass = Rational(d - static_cast<std::int64_t>(w.settling_count), d);
  cert.sm3_agreement = Rational(static_cast<std::int64_t>(w.fixed_count), d);
  return cert;
}

std::string obstruction_to_json(const ObstructionCertificate& cert) {
  nlohmann::json j;
  j["element"] = cert.element_pos;
  if (cert.witness_point.has_value()) {
    j["witness_point"] = *cert.witness_point;
    j["witness_fiber"] = cert.witness_fiber;
  } else {
    j["witness_point"] = nullptr;
  }
  j["fixed_count"] = cert.fixed_count;
  j["settling_count"] = cert.settling_count;
  j["implied_delta"] = cert.implied_delta;
  j["sm2_mass"] = to_string(cert.sm2_mass);
  j["sm3_agreement"] = to_string(cert.sm3_agreement);
  return j.dump(2);
}

// -- bicyclic search -----------------------------------------------------------

namespace {

struct SearchScore {
  bool feasible = false;
  Rational primary{0};  // sm3 when feasible, -sm2 when not

  bool better_than(const SearchScore& other) const {
    if (feasible != other.feasible) return feasible;
    return primary > other.primary;
  }
};

struct BicyclicState {
  std::vector<std::uint32_t> p_image;
  std::vector<std::uint32_t> q_image;
};

Chart bicyclic_chart_from(const BicyclicState& state, std::size_t d, std::uint64_t seed) {
  Chart chart;
  chart.carrier = d;
  chart.monoid_descriptor = "bicyclic";
  chart.elements = {"1", "p", "q", "q p"};
  chart.identity_pos = 0;
  Transformation p(state.p_image);
  Transformation q(state.q_image);
  chart.sigma.push_back(Transformation::identity(d));
  chart.sigma.push_back(p);
  chart.sigma.push_back(q);
  chart.sigma.push_back(compose(q, p));
  chart.seed = seed;
  return chart;
}

SearchScore score_report(const QualityReport& report, const Rational& budget) {
  SearchScore s;
  s.feasible = report.sm2_defect <= budget;
  s.primary = s.feasible ? report.sm3_separation : -report.sm2_defect;
  return s;
}

}  // namespace

SearchResult bicyclic_chart_search(std::size_t d, std::size_t iterations, std::uint64_t seed,
                                   const Rational& sm2_budget) {
  constexpr std::size_t kRestartAfterStagnant = 500;
  const MonoidPtr monoid = make_monoid("bicyclic");
  Rng rng(seed);

  auto fresh = [&]() {
    return BicyclicState{random_image(rng, d), random_image(rng, d)};
  };

  BicyclicState current = fresh();
  Chart current_chart = bicyclic_chart_from(current, d, seed);
  QualityReport current_report = quality(current_chart, *monoid);
  SearchScore current_score = score_report(current_report, sm2_budget);

  SearchResult result{current_chart, current_report, {}};
  SearchScore best_score = current_score;
  result.trace.reserve(iterations);

  std::size_t stagnant = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    BicyclicState candidate = current;
    if (stagnant >= kRestartAfterStagnant) {
      candidate = fresh();
      stagnant = 0;
    } else {
      auto& image = (uniform_below(rng, 2) == 0) ? candidate.p_image : candidate.q_image;
      const std::size_t v = uniform_below(rng, d);
      image[v] = static_cast<std::uint32_t>(uniform_below(rng, d));
    }
    const Chart chart = bicyclic_chart_from(candidate, d, seed);
    const QualityReport report = quality(chart, *monoid);
    const SearchScore score = score_report(report, sm2_budget);

    bool improved = false;
    if (score.better_than(current_score)) {
      current = candidate;
      current_score = score;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (score.better_than(best_score)) {
      best_score = score;
      result.best = chart;
      result.best_report = report;
      improved = true;
    }
    result.trace.push_back(
        SearchTracePoint{it, report.sm2_defect, report.sm3_separation, improved});
  }
  return result;
}

// -- serialization -------------------------------------------------------------

std::string chart_to_json(const Chart& chart) {
  nlohmann::json j;
  j["d"] = chart.carrier;
  j["monoid"] = chart.monoid_descriptor;
  j["elements"] = chart.elements;
  j["identity"] = chart.identity_pos;
  nlohmann::json sigma = nlohmann::json::array();
  for (const auto& t : chart.sigma) {
    sigma.push_back(std::vector<std::uint32_t>(t.image().begin(), t.image().end()));
  }
  j["sigma"] = std::move(sigma);
  if (chart.seed.has_value()) {
    j["seed"] = *chart.seed;
  }
  return j.dump(2);
}

Chart chart_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Chart chart;
  chart.carrier = j.at("d").get<std::size_t>();
  chart.monoid_descriptor = j.at("monoid").get<std::string>();
  chart.elements = j.at("elements").get<std::vector<std::string>>();
  chart.identity_pos = j.at("identity").get<std::size_t>();
  for (const auto& row : j.at("sigma")) {
    chart.sigma.emplace_back(row.get<std::vector<std::uint32_t>>());
  }
  if (j.contains("seed")) {
    chart.seed = j.at("seed").get<std::uint64_t>();
  }
  validate_chart(chart);
  return chart;
}

Chart load_chart(const std::string& path) { return chart_from_json_text(read_file(path)); }

void save_chart(const Chart& chart, const std::string& path) {
  const std::string text = chart_to_json(chart);
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write file: " + path);
  }
  out << text << "\n";
}

}  // namespace soficlab
