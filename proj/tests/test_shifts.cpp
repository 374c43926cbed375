#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "soficlab/monoid.hpp"
#include "soficlab/prng.hpp"
#include "soficlab/shifts.hpp"

using namespace soficlab;

namespace {

SftSpec golden_mean() {
  SftSpec sft;
  sft.alphabet.size = 2;
  sft.forbidden.push_back({{"0", "1"}, {1, 1}});
  return sft;
}

MonoidFragment z_window(std::int64_t lo, std::int64_t hi) {
  const MonoidPtr monoid = make_monoid("int-add");
  std::vector<std::string> labels;
  for (std::int64_t v = lo; v <= hi; ++v) {
    labels.push_back(std::to_string(v));
  }
  return MonoidFragment::from_labels(monoid, labels);
}

}  // namespace

TEST_CASE("full shift local language is everything") {
  SftSpec full;
  full.alphabet.size = 3;
  const MonoidFragment frag = z_window(-1, 2);
  const std::vector<std::size_t> window{*frag.find("0"), *frag.find("1")};
  const LocalLanguage lang = local_language(full, window, frag);
  CHECK(lang.patterns.size() == 9);
  CHECK_FALSE(lang.approximate);
}

TEST_CASE("golden mean local language over {0,1}") {
  const MonoidFragment frag = z_window(-2, 3);
  const std::vector<std::size_t> window{*frag.find("0"), *frag.find("1")};
  const LocalLanguage lang = local_language(golden_mean(), window, frag);
  REQUIRE(lang.patterns.size() == 3);  // (1,1) excluded
  for (const auto& q : lang.patterns) {
    CHECK_FALSE((q[0] == 1 && q[1] == 1));
  }
}

TEST_CASE("exact language over the multiplicative {0,1} monoid") {
  const FiniteMonoid boolean(2, testing::bool_table());
  SftSpec sft;
  sft.alphabet.size = 2;
  sft.forbidden.push_back({{"0"}, {1}});  // forbid value 1 at the zero element
  // window = (identity, zero); the zero element is absorbing, so x(0) = 1 is
  // forbidden at every translate and exactly x(0) = 0 survives
  const std::vector<std::size_t> window{1, 0};
  const LocalLanguage lang = local_language_exact(sft, window, boolean);
  REQUIRE(lang.patterns.size() == 2);
  for (const auto& q : lang.patterns) {
    CHECK(q[1] == 0);
  }
}

TEST_CASE("exact admissibility is contained in local admissibility") {
  Rng rng(41);
  const auto monoid = std::make_shared<const FiniteMonoid>(4, testing::map2_table());
  const MonoidFragment whole = MonoidFragment::whole(monoid);
  for (int trial = 0; trial < 25; ++trial) {
    SftSpec sft;
    sft.alphabet.size = 2;
    const std::size_t patterns = 1 + uniform_below(rng, 2);
    for (std::size_t i = 0; i < patterns; ++i) {
      LabeledPattern p;
      const std::size_t support_size = 1 + uniform_below(rng, 2);
      std::set<std::size_t> support;
      while (support.size() < support_size) {
        support.insert(uniform_below(rng, 4));
      }
      for (std::size_t s : support) {
        p.support.push_back(std::to_string(s));
        p.values.push_back(static_cast<std::uint32_t>(uniform_below(rng, 2)));
      }
      sft.forbidden.push_back(std::move(p));
    }
    const std::vector<std::size_t> window{whole.identity_pos(), 0, 2};
    const LocalLanguage exact = local_language_exact(sft, window, *monoid);
    const LocalLanguage local = local_language(sft, window, whole);
    const std::set<std::vector<std::uint32_t>> local_set(local.patterns.begin(),
                                                         local.patterns.end());
    for (const auto& q : exact.patterns) {
      CHECK(local_set.contains(q));
    }
  }
}

TEST_CASE("ca_apply_window with the identity rule restricts the input") {
  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0"};
  ca.rule = {0, 1};
  const MonoidFragment frag = z_window(0, 4);
  const std::vector<std::size_t> window{*frag.find("1"), *frag.find("2"), *frag.find("3")};
  const std::vector<std::uint32_t> values{1, 0, 1};
  CHECK(ca_apply_window(ca, frag, window, values, window) == values);
}

TEST_CASE("ca_apply_window computes the XOR rule pointwise") {
  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0", "1"};
  ca.rule = {0, 1, 1, 0};  // x(m) xor x(m+1), memory order (0,1), 0 least significant
  const MonoidFragment frag = z_window(0, 5);
  std::vector<std::size_t> input;
  for (std::int64_t v = 0; v <= 5; ++v) input.push_back(*frag.find(std::to_string(v)));
  const std::vector<std::uint32_t> x{0, 1, 1, 0, 1, 0};
  std::vector<std::size_t> output;
  for (std::int64_t v = 0; v <= 4; ++v) output.push_back(*frag.find(std::to_string(v)));
  const std::vector<std::uint32_t> image = ca_apply_window(ca, frag, input, x, output);
  CHECK(image == std::vector<std::uint32_t>{1, 0, 1, 1, 1});

  CHECK_THROWS_AS(ca_apply_window(ca, frag, input, x,
                                  std::vector<std::size_t>{*frag.find("5")}),
                  std::invalid_argument);  // needs x(6)
}

TEST_CASE("constant rule maps everything to zero") {
  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0"};
  ca.rule = {0, 0};
  const MonoidFragment frag = z_window(0, 3);
  const std::vector<std::size_t> window{*frag.find("0"), *frag.find("1")};
  CHECK(ca_apply_window(ca, frag, window, {1, 1}, window) ==
        std::vector<std::uint32_t>{0, 0});
}

TEST_CASE("full map of the identity CA is bijective") {
  const FiniteMonoid z3(3, testing::z_mod_table(3));
  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0"};
  ca.rule = {0, 1};
  const FullMap map = ca_full_map(z3, ca);
  CHECK(map.injective());
  CHECK(map.surjective());
}

TEST_CASE("projection CA on the multiplicative monoid is not injective") {
  const FiniteMonoid boolean(2, testing::bool_table());
  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0", "1"};
  // projection to the value at element 0; table index = x(0) + 2 x(1)
  ca.rule = {0, 1, 0, 1};
  const FullMap map = ca_full_map(boolean, ca);
  CHECK_FALSE(map.injective());
  std::set<std::uint64_t> image(map.table.begin(), map.table.end());
  CHECK(image.size() == 2);
}

TEST_CASE("induced CAs are equivariant; injective implies surjective (small monoids)") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const auto& table : testing::monoids_up_to_iso(n)) {
      const FiniteMonoid m(n, table);
      const SurjunctivityResult check = surjunctivity_check(m, 2, 2);
      CHECK(check.all_injective_surjective);
      CHECK(check.injective_count >= 1);  // the identity CA at least
      // equivariance of every induced map
      for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
        std::vector<std::string> memory;
        for (std::size_t e = 0; e < n; ++e) {
          if (mask & (std::size_t(1) << e)) memory.push_back(std::to_string(e));
        }
        if (memory.size() > 2) continue;
        std::size_t inputs = 1;
        for (std::size_t i = 0; i < memory.size(); ++i) inputs *= 2;
        for (std::size_t r = 0; r < (std::size_t(1) << inputs); ++r) {
          CellularAutomaton ca;
          ca.alphabet.size = 2;
          ca.memory = memory;
          for (std::size_t i = 0; i < inputs; ++i) {
            ca.rule.push_back(static_cast<std::uint32_t>((r >> i) & 1));
          }
          CHECK(check_equivariance(m, ca));
        }
      }
    }
  }
}

TEST_CASE("order-4 monoids: exhaustive surjunctivity, sampled equivariance") {
  const auto monoids = testing::monoids_up_to_iso(4);
  CHECK(monoids.size() == 35);  // known count of order-4 monoids
  Rng rng(43);
  for (const auto& table : monoids) {
    const FiniteMonoid m(4, table);
    CHECK(surjunctivity_check(m, 2, 2).all_injective_surjective);
    CellularAutomaton ca;
    ca.alphabet.size = 2;
    const std::size_t first = uniform_below(rng, 4);
    const std::size_t second = (first + 1 + uniform_below(rng, 3)) % 4;
    ca.memory = {std::to_string(first), std::to_string(second)};
    for (int i = 0; i < 4; ++i) {
      ca.rule.push_back(static_cast<std::uint32_t>(uniform_below(rng, 2)));
    }
    CHECK(check_equivariance(m, ca));
  }
}

TEST_CASE("a hand-built asymmetric swap is not equivariant") {
  const FiniteMonoid boolean(2, testing::bool_table());
  // identity on configurations except that 00 and 01 swap
  const std::vector<std::uint64_t> swapped{1, 0, 2, 3};
  CHECK_FALSE(check_equivariance_table(boolean, 2, swapped));
  const std::vector<std::uint64_t> identity_table{0, 1, 2, 3};
  CHECK(check_equivariance_table(boolean, 2, identity_table));
}

TEST_CASE("composition of induced CAs has the product memory set") {
  const FiniteMonoid m(4, testing::map2_table());
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto random_ca = [&]() {
      CellularAutomaton ca;
      ca.alphabet.size = 2;
      std::set<std::size_t> mem;
      const std::size_t size = 1 + uniform_below(rng, 2);
      while (mem.size() < size) mem.insert(uniform_below(rng, 4));
      std::size_t inputs = 1;
      for (std::size_t s : mem) {
        ca.memory.push_back(std::to_string(s));
        inputs *= 2;
      }
      for (std::size_t i = 0; i < inputs; ++i) {
        ca.rule.push_back(static_cast<std::uint32_t>(uniform_below(rng, 2)));
      }
      return ca;
    };
    const CellularAutomaton outer = random_ca();
    const CellularAutomaton inner = random_ca();
    const FullMap outer_map = ca_full_map(m, outer);
    const FullMap inner_map = ca_full_map(m, inner);
    std::vector<std::uint64_t> composed(outer_map.table.size());
    for (std::size_t i = 0; i < composed.size(); ++i) {
      composed[i] = outer_map.table[inner_map.table[i]];
    }

    // memory of the composition: products s2 * s1 with s2 from the inner map
    std::set<std::size_t> product_memory;
    for (const auto& s1 : outer.memory) {
      for (const auto& s2 : inner.memory) {
        product_memory.insert(m.mul(static_cast<std::size_t>(std::stoull(s2)),
                                    static_cast<std::size_t>(std::stoull(s1))));
      }
    }
    CellularAutomaton fused;
    fused.alphabet.size = 2;
    const std::vector<std::size_t> mem(product_memory.begin(), product_memory.end());
    for (std::size_t s : mem) fused.memory.push_back(std::to_string(s));
    // extract the local rule from the composed table: the image value at the
    // identity as a function of the restriction to the memory set
    const std::size_t inputs = std::size_t(1) << mem.size();
    fused.rule.assign(inputs, 0);
    for (std::size_t pattern = 0; pattern < inputs; ++pattern) {
      std::uint64_t config = 0;
      for (std::size_t j = 0; j < mem.size(); ++j) {
        if (pattern & (std::size_t(1) << j)) {
          config |= std::uint64_t(1) << mem[j];
        }
      }
      const std::uint64_t out = composed[config];
      fused.rule[pattern] = static_cast<std::uint32_t>((out >> m.identity_index()) & 1);
    }
    const FullMap fused_map = ca_full_map(m, fused);
    CHECK(fused_map.table == composed);
  }
}

TEST_CASE("SFT and CA JSON round trips") {
  const SftSpec sft = golden_mean();
  const SftSpec back = sft_from_json_text(sft_to_json(sft));
  CHECK(sft_to_json(back) == sft_to_json(sft));
  CHECK(back.forbidden.size() == 1);

  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0", "1"};
  ca.rule = {0, 1, 1, 0};
  CHECK(ca_to_json(ca_from_json_text(ca_to_json(ca))) == ca_to_json(ca));

  CHECK_THROWS_AS(ca_from_json_text(R"({"alphabet":2,"memory":["0"],"rule":[0,1,0]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      sft_from_json_text(
          R"({"alphabet":2,"forbidden":[{"support":["0","0"],"values":[1,1]}]})"),
      std::invalid_argument);
}

TEST_CASE("configuration cap is enforced") {
  const FiniteMonoid z3(3, testing::z_mod_table(3));
  CellularAutomaton ca;
  ca.alphabet.size = 2;
  ca.memory = {"0"};
  ca.rule = {0, 1};
  CHECK_THROWS_AS(ca_full_map(z3, ca, 4), CapExceededError);
}
