#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soficlab/monoid.hpp"

namespace soficlab {

/// Symbols are 0, ..., size-1.
struct Alphabet {
  std::uint32_t size = 2;
};

/// A pattern pinned to monoid elements by label: support entries are distinct,
/// values index into the alphabet.
struct LabeledPattern {
  std::vector<std::string> support;
  std::vector<std::uint32_t> values;
};

/// Subshift of finite type: everything not containing a translate of a
/// forbidden pattern. An empty list denotes the full shift.
struct SftSpec {
  Alphabet alphabet;
  std::vector<LabeledPattern> forbidden;

  bool is_full_shift() const { return forbidden.empty(); }
};

void validate_sft(const SftSpec& sft);
std::string sft_to_json(const SftSpec& sft);
SftSpec sft_from_json_text(const std::string& text);
SftSpec load_sft(const std::string& path);

/// Patterns over a window, each aligned with the window's position order.
/// `approximate` records that some translate could not be resolved inside the
/// fragment and was skipped, so the language may over-admit.
struct LocalLanguage {
  std::vector<std::vector<std::uint32_t>> patterns;
  bool approximate = false;
};

/// Local admissibility: keeps the patterns q over `window` (fragment
/// positions) such that no forbidden pattern, translated by right
/// multiplication within the fragment, lands inside the window and matches q.
/// Over-admits relative to true admissibility for infinite monoids; use
/// local_language_exact for finite ones.
LocalLanguage local_language(const SftSpec& sft, const std::vector<std::size_t>& window,
                             const MonoidFragment& fragment);

inline constexpr std::size_t kDefaultConfigCap = std::size_t(1) << 20;

/// Global admissibility over a finite monoid: enumerates all |A|^|M|
/// configurations, drops the ones containing a forbidden translate anywhere,
/// and restricts the survivors to the window.
LocalLanguage local_language_exact(const SftSpec& sft, const std::vector<std::size_t>& window,
                                   const FiniteMonoid& monoid,
                                   std::size_t config_cap = kDefaultConfigCap);

/// Memory set plus local rule, the finite description of a cellular automaton:
/// tau(x)(m) = rule((m x)|_S) with (m x)(s) = x(s m). The rule table is
/// indexed by the mixed-radix encoding of A^S: entry at
/// sum_j value(s_j) * |A|^j, memory order as listed, first element least
/// significant.
struct CellularAutomaton {
  Alphabet alphabet;
  std::vector<std::string> memory;
  std::vector<std::uint32_t> rule;
};

void validate_ca(const CellularAutomaton& ca);
std::string ca_to_json(const CellularAutomaton& ca);
CellularAutomaton ca_from_json_text(const std::string& text);
CellularAutomaton load_ca(const std::string& path);

/// Applies the local rule on a window: output(m) = rule(s -> x(s*m)). The
/// input window must contain s*m for every s in the memory set and m in the
/// output window; a missing point throws.
std::vector<std::uint32_t> ca_apply_window(const CellularAutomaton& ca,
                                           const MonoidFragment& fragment,
                                           const std::vector<std::size_t>& input_window,
                                           const std::vector<std::uint32_t>& input_values,
                                           const std::vector<std::size_t>& output_window);

/// The full table of tau over A^M for a finite monoid. Configurations are
/// encoded mixed-radix over the monoid's element order (element 0 least
/// significant).
struct FullMap {
  std::uint32_t alphabet = 2;
  std::size_t points = 0;
  std::vector<std::uint64_t> table;

  bool injective() const;
  bool surjective() const;
};

FullMap ca_full_map(const FiniteMonoid& monoid, const CellularAutomaton& ca,
                    std::size_t config_cap = kDefaultConfigCap);

/// tau(m x) = m tau(x) for all m and all configurations. Continuity is
/// automatic on a finite configuration space.
bool check_equivariance(const FiniteMonoid& monoid, const CellularAutomaton& ca,
                        std::size_t config_cap = kDefaultConfigCap);

/// Same check for an arbitrary explicit self-map of the configuration space.
bool check_equivariance_table(const FiniteMonoid& monoid, std::uint32_t alphabet,
                              const std::vector<std::uint64_t>& table);

/// Exhaustive surjunctivity sweep: every memory set of size <= max_memory,
/// every rule table. Returns the first injective-but-not-surjective CA if one
/// exists (none should, on a finite monoid).
struct SurjunctivityResult {
  std::size_t automata_checked = 0;
  std::size_t injective_count = 0;
  bool all_injective_surjective = true;
  std::optional<CellularAutomaton> counterexample;
};

SurjunctivityResult surjunctivity_check(const FiniteMonoid& monoid, std::uint32_t alphabet,
                                        std::size_t max_memory,
                                        std::size_t config_cap = kDefaultConfigCap);

}  // namespace soficlab
