#include <doctest.h>

#include "helpers.hpp"
#include "soficlab/prng.hpp"
#include "soficlab/transformation.hpp"

using namespace soficlab;

namespace {

Transformation random_transformation(Rng& rng, std::size_t d) {
  return Transformation(random_image(rng, d));
}

/// All self-maps of {0,...,d-1}, odometer order.
std::vector<Transformation> all_transformations(std::size_t d) {
  std::vector<Transformation> out;
  std::vector<std::uint32_t> image(d, 0);
  while (true) {
    out.emplace_back(image);
    std::size_t pos = 0;
    while (pos < d && ++image[pos] == d) {
      image[pos] = 0;
      ++pos;
    }
    if (pos == d) break;
  }
  return out;
}

}  // namespace

TEST_CASE("compose evaluates pointwise") {
  const Transformation f({1, 2, 0});
  const Transformation g({0, 0, 1});
  CHECK(compose(f, g) == Transformation({1, 1, 2}));
  CHECK(compose(Transformation::identity(3), f) == f);
  CHECK(compose(f, Transformation::identity(3)) == f);
  const Transformation c1 = Transformation::constant(5, 2);
  const Transformation c2 = Transformation::constant(5, 4);
  CHECK(compose(c1, c2) == c1);  // constants are left-absorbing
  CHECK_THROWS_AS(compose(f, c1), std::invalid_argument);
}

TEST_CASE("hamming basics") {
  const Transformation f({1, 2, 0});
  CHECK(hamming(f, f) == Rational(0));
  CHECK(hamming(Transformation::identity(3), Transformation::constant(3, 0)) == Rational(2, 3));
  CHECK_THROWS_AS(hamming(f, Transformation::identity(4)), std::invalid_argument);
}

TEST_CASE("hamming is a metric, exhaustively on tiny carriers") {
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto maps = all_transformations(d);
    for (const auto& f : maps) {
      for (const auto& g : maps) {
        const Rational fg = hamming(f, g);
        CHECK(fg >= Rational(0));
        CHECK(fg <= Rational(1));
        CHECK(fg == hamming(g, f));
        CHECK((fg == Rational(0)) == (f == g));
        for (const auto& h : maps) {
          CHECK(fg <= hamming(f, h) + hamming(h, g));
        }
      }
    }
  }
}

TEST_CASE("hamming triangle inequality on random larger carriers") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 4 + uniform_below(rng, 61);
    const Transformation f = random_transformation(rng, d);
    const Transformation g = random_transformation(rng, d);
    const Transformation h = random_transformation(rng, d);
    CHECK(hamming(f, g) <= hamming(f, h) + hamming(h, g));
    CHECK(hamming(f, g) == hamming(g, f));
  }
}

TEST_CASE("product embedding is a monoid morphism") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 3);
    std::vector<Transformation> fs, gs, identities;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = 1 + uniform_below(rng, 6);
      fs.push_back(random_transformation(rng, d));
      gs.push_back(random_transformation(rng, d));
      identities.push_back(Transformation::identity(d));
    }
    std::vector<Transformation> composed;
    for (std::size_t i = 0; i < n; ++i) {
      composed.push_back(compose(fs[i], gs[i]));
    }
    CHECK(product_embed(composed) == compose(product_embed(fs), product_embed(gs)));
    CHECK(product_embed(identities).is_identity());
  }
  CHECK_THROWS_AS(product_embed({}), std::invalid_argument);
}

TEST_CASE("product hamming formula holds exactly") {
  // the spec's worked pair: distances 1/2 and 1/3 combine to 2/3
  const Transformation f1({1, 0}), g1({1, 1});          // distance 1/2
  const Transformation f2({0, 1, 2}), g2({0, 1, 0});    // distance 1/3
  CHECK(hamming(f1, g1) == Rational(1, 2));
  CHECK(hamming(f2, g2) == Rational(1, 3));
  CHECK(hamming(product_embed(std::vector{f1, f2}), product_embed(std::vector{g1, g2})) ==
        Rational(2, 3));

  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + uniform_below(rng, 3);
    std::vector<Transformation> fs, gs;
    Rational complement(1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t d = 1 + uniform_below(rng, 6);
      fs.push_back(random_transformation(rng, d));
      gs.push_back(random_transformation(rng, d));
      complement *= Rational(1) - hamming(fs[i], gs[i]);
    }
    CHECK(hamming(product_embed(fs), product_embed(gs)) == Rational(1) - complement);
  }
}

TEST_CASE("max_fiber") {
  CHECK(max_fiber(Transformation::identity(7)) == 1);
  CHECK(max_fiber(Transformation({3, 0, 2, 1})) == 1);  // permutation
  CHECK(max_fiber(Transformation::constant(10, 4)) == 10);
  CHECK(max_fiber(Transformation({0, 0, 1, 1, 1})) == 3);
}

TEST_CASE("fiber counts sum to the carrier") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + uniform_below(rng, 40);
    const Transformation f = random_transformation(rng, d);
    std::vector<std::size_t> fiber(d, 0);
    for (std::size_t v = 0; v < d; ++v) ++fiber[f(v)];
    std::size_t total = 0;
    for (std::size_t c : fiber) total += c;
    CHECK(total == d);
    CHECK(max_fiber(f) == *std::max_element(fiber.begin(), fiber.end()));
  }
}

TEST_CASE("fiber witness on a constant map") {
  const FiberWitness w = idempotent_fiber_witness(Transformation::constant(10, 3));
  REQUIRE(w.point.has_value());
  CHECK(*w.point == 3);
  CHECK(w.fiber_size == 10);
  CHECK(w.fixed_count == 1);
  CHECK(w.settling_count == 10);
  CHECK(w.pigeonhole_bound() == 10);
}

TEST_CASE("fixed-point-free involution has no witness") {
  const FiberWitness w = idempotent_fiber_witness(Transformation({1, 0, 3, 2}));
  CHECK_FALSE(w.point.has_value());
  CHECK(w.fixed_count == 0);
  CHECK(w.settling_count == 0);
}

TEST_CASE("random idempotents meet the pigeonhole bound") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + uniform_below(rng, 12);
    const Transformation f = testing::random_idempotent(rng, d);
    CHECK(compose(f, f) == f);
    const FiberWitness w = idempotent_fiber_witness(f);
    REQUIRE(w.point.has_value());
    CHECK(w.settling_count == d);  // idempotents settle everywhere
    CHECK(w.fiber_size * w.fixed_count >= d);
    CHECK(w.fiber_size >= (d + w.fixed_count - 1) / w.fixed_count);
    // the witness names a concrete fiber of that size
    std::size_t count = 0;
    for (std::size_t v = 0; v < d; ++v) {
      if (f(v) == *w.point) ++count;
    }
    CHECK(count == w.fiber_size);
  }
}

TEST_CASE("witness bound holds whenever the settling set is nonempty") {
  Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + uniform_below(rng, 30);
    const Transformation f = random_transformation(rng, d);
    const FiberWitness w = idempotent_fiber_witness(f);
    if (w.settling_count == 0) continue;
    REQUIRE(w.point.has_value());
    CHECK(w.fiber_size >= w.pigeonhole_bound());
    CHECK(f(*w.point) == *w.point);  // witness lands in the fixed set
  }
}
