#include "soficlab/shifts.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

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

/// a^n, or nullopt past cap.
std::optional<std::size_t> checked_pow(std::size_t a, std::size_t n, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / a) return std::nullopt;
    total *= a;
  }
  return total;
}

}  // namespace

void validate_sft(const SftSpec& sft) {
  if (sft.alphabet.size < 1) {
    throw std::invalid_argument("alphabet must have at least one symbol");
  }
  for (const auto& pattern : sft.forbidden) {
    if (pattern.support.empty() || pattern.support.size() != pattern.values.size()) {
      throw std::invalid_argument("forbidden pattern needs matching nonempty support/values");
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : pattern.support) {
      if (!seen.insert(label).second) {
        throw std::invalid_argument("forbidden pattern support has duplicates: " + label);
      }
    }
    for (std::uint32_t v : pattern.values) {
      if (v >= sft.alphabet.size) {
        throw std::invalid_argument("forbidden pattern value outside the alphabet");
      }
    }
  }
}

// -- local languages ----------------------------------------------------------

namespace {

/// A translate fully inside the window: the pattern matches q iff q agrees with
/// `values` at `positions` (window indices).
struct WindowConstraint {
  std::vector<std::size_t> positions;
  std::vector<std::uint32_t> values;
};

std::vector<std::vector<std::uint32_t>> enumerate_window(
    std::uint32_t alphabet, std::size_t window_size,
    const std::vector<WindowConstraint>& constraints) {
  const auto total = checked_pow(alphabet, window_size, kDefaultConfigCap);
  if (!total.has_value()) {
    throw CapExceededError("window pattern space exceeds cap");
  }
  std::vector<std::vector<std::uint32_t>> language;
  std::vector<std::uint32_t> q(window_size, 0);
  for (std::size_t idx = 0; idx < *total; ++idx) {
    bool excluded = false;
    for (const auto& c : constraints) {
      bool matched = true;
      for (std::size_t i = 0; i < c.positions.size() && matched; ++i) {
        matched = q[c.positions[i]] == c.values[i];
      }
      if (matched) {
        excluded = true;
        break;
      }
    }
    if (!excluded) {
      language.push_back(q);
    }
    for (std::size_t i = 0; i < window_size; ++i) {  // odometer, position 0 fastest
      if (++q[i] < alphabet) break;
      q[i] = 0;
    }
  }
  return language;
}

}  // namespace

LocalLanguage local_language(const SftSpec& sft, const std::vector<std::size_t>& window,
                             const MonoidFragment& fragment) {
  validate_sft(sft);
  std::unordered_map<std::size_t, std::size_t> window_index;
  for (std::size_t i = 0; i < window.size(); ++i) {
    window_index.emplace(window[i], i);
  }

  LocalLanguage result;
  std::vector<WindowConstraint> constraints;
  for (const auto& pattern : sft.forbidden) {
    std::vector<std::size_t> support;
    bool support_ok = true;
    for (const auto& label : pattern.support) {
      const auto pos = fragment.find(label);
      if (!pos.has_value()) {
        support_ok = false;
        break;
      }
      support.push_back(*pos);
    }
    if (!support_ok) {
      result.approximate = true;  // cannot place any translate of this pattern
      continue;
    }
    for (std::size_t m = 0; m < fragment.size(); ++m) {
      WindowConstraint constraint;
      bool in_window = true;
      bool resolvable = true;
      bool consistent = true;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const auto translated = fragment.product(support[i], m);
        if (!translated.has_value()) {
          resolvable = false;
          break;
        }
        const auto at = window_index.find(*translated);
        if (at == window_index.end()) {
          in_window = false;
          break;
        }
        // repeated target: consistent values collapse, conflicting ones can
        // never match any pattern
        bool duplicate = false;
        for (std::size_t j = 0; j < constraint.positions.size(); ++j) {
          if (constraint.positions[j] == at->second) {
            duplicate = true;
            consistent = constraint.values[j] == pattern.values[i];
            break;
          }
        }
        if (!consistent) break;
        if (!duplicate) {
          constraint.positions.push_back(at->second);
          constraint.values.push_back(pattern.values[i]);
        }
      }
      if (!resolvable) {
        result.approximate = true;
        continue;
      }
      if (in_window && consistent) {
        constraints.push_back(std::move(constraint));
      }
    }
  }
  result.patterns = enumerate_window(sft.alphabet.size, window.size(), constraints);
  return result;
}

LocalLanguage local_language_exact(const SftSpec& sft, const std::vector<std::size_t>& window,
                                   const FiniteMonoid& monoid, std::size_t config_cap) {
  validate_sft(sft);
  const std::size_t n = monoid.order();
  const auto total = checked_pow(sft.alphabet.size, n, config_cap);
  if (!total.has_value()) {
    throw CapExceededError("configuration space exceeds cap");
  }
  for (std::size_t w : window) {
    if (w >= n) {
      throw std::invalid_argument("window position outside the monoid");
    }
  }
  std::vector<std::vector<std::size_t>> supports;
  for (const auto& pattern : sft.forbidden) {
    std::vector<std::size_t> support;
    for (const auto& label : pattern.support) {
      const Element e = monoid.parse(label);
      support.push_back(static_cast<std::size_t>(std::get<std::int64_t>(e.value)));
    }
    supports.push_back(std::move(support));
  }

  std::set<std::vector<std::uint32_t>> restrictions;
  std::vector<std::uint32_t> x(n, 0);
  for (std::size_t idx = 0; idx < *total; ++idx) {
    bool admissible = true;
    for (std::size_t pi = 0; pi < supports.size() && admissible; ++pi) {
      for (std::size_t m = 0; m < n && admissible; ++m) {
        bool matched = true;
        for (std::size_t i = 0; i < supports[pi].size() && matched; ++i) {
          matched = x[monoid.mul(supports[pi][i], m)] == sft.forbidden[pi].values[i];
        }
        admissible = !matched;
      }
    }
    if (admissible) {
      std::vector<std::uint32_t> q(window.size());
      for (std::size_t i = 0; i < window.size(); ++i) {
        q[i] = x[window[i]];
      }
      restrictions.insert(std::move(q));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (++x[i] < sft.alphabet.size) break;
      x[i] = 0;
    }
  }
  LocalLanguage result;
  result.patterns.assign(restrictions.begin(), restrictions.end());
  return result;
}

// -- cellular automata ----------------------------------------------------------

void validate_ca(const CellularAutomaton& ca) {
  if (ca.alphabet.size < 1) {
    throw std::invalid_argument("alphabet must have at least one symbol");
  }
  if (ca.memory.empty()) {
    throw std::invalid_argument("memory set must be nonempty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& label : ca.memory) {
    if (!seen.insert(label).second) {
      throw std::invalid_argument("memory set has duplicates: " + label);
    }
  }
  const auto expected = checked_pow(ca.alphabet.size, ca.memory.size(), kDefaultConfigCap);
  if (!expected.has_value() || ca.rule.size() != *expected) {
    throw std::invalid_argument("rule table must have |A|^|S| entries");
  }
  for (std::uint32_t v : ca.rule) {
    if (v >= ca.alphabet.size) {
      throw std::invalid_argument("rule value outside the alphabet");
    }
  }
}

std::vector<std::uint32_t> ca_apply_window(const CellularAutomaton& ca,
                                           const MonoidFragment& fragment,
                                           const std::vector<std::size_t>& input_window,
                                           const std::vector<std::uint32_t>& input_values,
                                           const std::vector<std::size_t>& output_window) {
  validate_ca(ca);
  if (input_window.size() != input_values.size()) {
    throw std::invalid_argument("input window and values must align");
  }
  std::unordered_map<std::size_t, std::uint32_t> value_at;
  for (std::size_t i = 0; i < input_window.size(); ++i) {
    value_at[input_window[i]] = input_values[i];
  }
  std::vector<std::size_t> memory;
  for (const auto& label : ca.memory) {
    const auto pos = fragment.find(label);
    if (!pos.has_value()) {
      throw std::invalid_argument("memory element not in fragment: " + label);
    }
    memory.push_back(*pos);
  }
  std::vector<std::uint32_t> output(output_window.size());
  for (std::size_t o = 0; o < output_window.size(); ++o) {
    std::size_t index = 0;
    std::size_t radix = 1;
    for (std::size_t j = 0; j < memory.size(); ++j) {
      const auto point = fragment.product(memory[j], output_window[o]);
      if (!point.has_value()) {
        throw std::invalid_argument("translate s*m escapes the fragment");
      }
      const auto it = value_at.find(*point);
      if (it == value_at.end()) {
        throw std::invalid_argument("missing input point " + fragment.label(*point));
      }
      index += it->second * radix;
      radix *= ca.alphabet.size;
    }
    output[o] = ca.rule[index];
  }
  return output;
}

bool FullMap::injective() const {
  std::vector<bool> seen(table.size(), false);
  for (std::uint64_t out : table) {
    if (seen[out]) return false;
    seen[out] = true;
  }
  return true;
}

bool FullMap::surjective() const {
  std::vector<bool> seen(table.size(), false);
  std::size_t distinct = 0;
  for (std::uint64_t out : table) {
    if (!seen[out]) {
      seen[out] = true;
      ++distinct;
    }
  }
  return distinct == table.size();
}

namespace {

std::vector<std::size_t> resolve_memory(const FiniteMonoid& monoid,
                                        const CellularAutomaton& ca) {
  std::vector<std::size_t> memory;
  for (const auto& label : ca.memory) {
    const Element e = monoid.parse(label);
    memory.push_back(static_cast<std::size_t>(std::get<std::int64_t>(e.value)));
  }
  return memory;
}

std::uint64_t apply_ca_config(const FiniteMonoid& monoid, const CellularAutomaton& ca,
                              const std::vector<std::size_t>& memory,
                              const std::vector<std::uint32_t>& x) {
  const std::size_t n = monoid.order();
  std::uint64_t out = 0;
  std::uint64_t radix = 1;
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t index = 0;
    std::size_t r = 1;
    for (std::size_t j = 0; j < memory.size(); ++j) {
      index += x[monoid.mul(memory[j], m)] * r;  // (m x)(s) = x(s m)
      r *= ca.alphabet.size;
    }
    out += static_cast<std::uint64_t>(ca.rule[index]) * radix;
    radix *= ca.alphabet.size;
  }
  return out;
}

}  // namespace

FullMap ca_full_map(const FiniteMonoid& monoid, const CellularAutomaton& ca,
                    std::size_t config_cap) {
  validate_ca(ca);
  const std::size_t n = monoid.order();
  const auto total = checked_pow(ca.alphabet.size, n, config_cap);
  if (!total.has_value()) {
    throw CapExceededError("configuration space exceeds cap");
  }
  const std::vector<std::size_t> memory = resolve_memory(monoid, ca);
  FullMap map;
  map.alphabet = ca.alphabet.size;
  map.points = n;
  map.table.resize(*total);
  std::vector<std::uint32_t> x(n, 0);
  for (std::size_t idx = 0; idx < *total; ++idx) {
    map.table[idx] = apply_ca_config(monoid, ca, memory, x);
    for (std::size_t i = 0; i < n; ++i) {
      if (++x[i] < ca.alphabet.size) break;
      x[i] = 0;
    }
  }
  return map;
}

namespace {

/// Configuration index of m.x given the index digits of x.
std::uint64_t shift_config(const FiniteMonoid& monoid, std::uint32_t alphabet,
                           const std::vector<std::uint32_t>& x, std::size_t m) {
  std::uint64_t out = 0;
  std::uint64_t radix = 1;
  for (std::size_t mp = 0; mp < monoid.order(); ++mp) {
    out += static_cast<std::uint64_t>(x[monoid.mul(mp, m)]) * radix;
    radix *= alphabet;
  }
  return out;
}

std::vector<std::uint32_t> decode_config(std::uint64_t idx, std::uint32_t alphabet,
                                         std::size_t n) {
  std::vector<std::uint32_t> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = static_cast<std::uint32_t>(idx % alphabet);
    idx /= alphabet;
  }
  return x;
}

}  // namespace

bool check_equivariance_table(const FiniteMonoid& monoid, std::uint32_t alphabet,
                              const std::vector<std::uint64_t>& table) {
  const std::size_t n = monoid.order();
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    const std::vector<std::uint32_t> x = decode_config(idx, alphabet, n);
    for (std::size_t m = 0; m < n; ++m) {
      const std::uint64_t shifted = shift_config(monoid, alphabet, x, m);
      const std::vector<std::uint32_t> tau_x = decode_config(table[idx], alphabet, n);
      if (table[shifted] != shift_config(monoid, alphabet, tau_x, m)) {
        return false;
      }
    }
  }
  return true;
}

bool check_equivariance(const FiniteMonoid& monoid, const CellularAutomaton& ca,
                        std::size_t config_cap) {
  const FullMap map = ca_full_map(monoid, ca, config_cap);
  return check_equivariance_table(monoid, ca.alphabet.size, map.table);
}

SurjunctivityResult surjunctivity_check(const FiniteMonoid& monoid, std::uint32_t alphabet,
                                        std::size_t max_memory, std::size_t config_cap) {
  const std::size_t n = monoid.order();
  if (n > 16) {
    throw CapExceededError("surjunctivity sweep limited to order <= 16");
  }
  SurjunctivityResult result;
  for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
    std::vector<std::string> memory;
    for (std::size_t e = 0; e < n; ++e) {
      if (mask & (std::size_t(1) << e)) {
        memory.push_back(std::to_string(e));
      }
    }
    if (memory.size() > max_memory) continue;
    const auto rule_inputs = checked_pow(alphabet, memory.size(), config_cap);
    const auto rule_count = rule_inputs ? checked_pow(alphabet, *rule_inputs, config_cap)
                                        : std::nullopt;
    if (!rule_count.has_value()) {
      throw CapExceededError("rule space exceeds cap");
    }
    for (std::size_t r = 0; r < *rule_count; ++r) {
      CellularAutomaton ca;
      ca.alphabet.size = alphabet;
      ca.memory = memory;
      std::size_t acc = r;
      for (std::size_t i = 0; i < *rule_inputs; ++i) {
        ca.rule.push_back(static_cast<std::uint32_t>(acc % alphabet));
        acc /= alphabet;
      }
      const FullMap map = ca_full_map(monoid, ca, config_cap);
      ++result.automata_checked;
      if (map.injective()) {
        ++result.injective_count;
        if (!map.surjective()) {
          result.all_injective_surjective = false;
          if (!result.counterexample.has_value()) {
            result.counterexample = ca;
          }
        }
      }
    }
  }
  return result;
}

// -- serialization ---------------------------------------------------------------

std::string sft_to_json(const SftSpec& sft) {
  nlohmann::json j;
  j["alphabet"] = sft.alphabet.size;
  nlohmann::json patterns = nlohmann::json::array();
  for (const auto& p : sft.forbidden) {
    patterns.push_back({{"support", p.support}, {"values", p.values}});
  }
  j["forbidden"] = std::move(patterns);
  return j.dump(2);
}

SftSpec sft_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SftSpec sft;
  sft.alphabet.size = j.at("alphabet").get<std::uint32_t>();
  if (j.contains("forbidden")) {
    for (const auto& p : j.at("forbidden")) {
      LabeledPattern pattern;
      pattern.support = p.at("support").get<std::vector<std::string>>();
      pattern.values = p.at("values").get<std::vector<std::uint32_t>>();
      sft.forbidden.push_back(std::move(pattern));
    }
  }
  validate_sft(sft);
  return sft;
}

SftSpec load_sft(const std::string& path) { return sft_from_json_text(read_file(path)); }

std::string ca_to_json(const CellularAutomaton& ca) {
  nlohmann::json j;
  j["alphabet"] = ca.alphabet.size;
  j["memory"] = ca.memory;
  j["rule"] = ca.rule;
  return j.dump(2);
}

CellularAutomaton ca_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CellularAutomaton ca;
  ca.alphabet.size = j.at("alphabet").get<std::uint32_t>();
  ca.memory = j.at("memory").get<std::vector<std::string>>();
  ca.rule = j.at("rule").get<std::vector<std::uint32_t>>();
  validate_ca(ca);
  return ca;
}

CellularAutomaton load_ca(const std::string& path) { return ca_from_json_text(read_file(path)); }

}  // namespace soficlab
