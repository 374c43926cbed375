#include "soficlab/transformation.hpp"

#include <stdexcept>

namespace soficlab {

Transformation::Transformation(std::vector<std::uint32_t> image) : image_(std::move(image)) {
  if (image_.empty()) {
    throw std::invalid_argument("transformation needs a nonempty carrier");
  }
  for (std::uint32_t v : image_) {
    if (v >= image_.size()) {
      throw std::invalid_argument("transformation image entry out of range");
    }
  }
}

Transformation Transformation::identity(std::size_t d) {
  std::vector<std::uint32_t> image(d);
  for (std::size_t v = 0; v < d; ++v) {
    image[v] = static_cast<std::uint32_t>(v);
  }
  return Transformation(std::move(image));
}

Transformation Transformation::constant(std::size_t d, std::uint32_t target) {
  return Transformation(std::vector<std::uint32_t>(d, target));
}

bool Transformation::is_identity() const {
  for (std::size_t v = 0; v < image_.size(); ++v) {
    if (image_[v] != v) return false;
  }
  return true;
}

Transformation compose(const Transformation& f, const Transformation& g) {
  if (f.carrier() != g.carrier()) {
    throw std::invalid_argument("carrier mismatch in compose");
  }
  std::vector<std::uint32_t> image(f.carrier());
  for (std::size_t v = 0; v < image.size(); ++v) {
    image[v] = f(g(v));
  }
  return Transformation(std::move(image));
}

Rational hamming(const Transformation& f, const Transformation& g) {
  if (f.carrier() != g.carrier()) {
    throw std::invalid_argument("carrier mismatch in hamming");
  }
  std::int64_t disagreements = 0;
  for (std::size_t v = 0; v < f.carrier(); ++v) {
    if (f(v) != g(v)) ++disagreements;
  }
  return Rational(disagreements, static_cast<std::int64_t>(f.carrier()));
}

Transformation product_embed(std::span<const Transformation> factors) {
  if (factors.empty()) {
    throw std::invalid_argument("product_embed needs at least one factor");
  }
  std::size_t total = 1;
  for (const auto& f : factors) {
    total *= f.carrier();
  }
  std::vector<std::uint32_t> image(total);
  // lexicographic product index, first factor most significant
  std::vector<std::size_t> digits(factors.size(), 0);
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      out = out * factors[i].carrier() + factors[i](digits[i]);
    }
    image[v] = static_cast<std::uint32_t>(out);
    for (std::size_t i = factors.size(); i-- > 0;) {
      if (++digits[i] < factors[i].carrier()) break;
      digits[i] = 0;
    }
  }
  return Transformation(std::move(image));
}

std::size_t max_fiber(const Transformation& f) {
  std::vector<std::size_t> counts(f.carrier(), 0);
  std::size_t best = 0;
  for (std::size_t v = 0; v < f.carrier(); ++v) {
    best = std::max(best, ++counts[f(v)]);
  }
  return best;
}

std::size_t FiberWitness::pigeonhole_bound() const {
  if (!point.has_value() || fixed_count == 0) {
    return 0;
  }
  return (settling_count + fixed_count - 1) / fixed_count;
}

FiberWitness idempotent_fiber_witness(const Transformation& f) {
  FiberWitness w;
  std::vector<std::size_t> fiber(f.carrier(), 0);
  std::vector<bool> in_image_of_settling(f.carrier(), false);
  for (std::size_t v = 0; v < f.carrier(); ++v) {
    ++fiber[f(v)];
    if (f(v) == static_cast<std::uint32_t>(v)) ++w.fixed_count;
    if (f(f(v)) == f(v)) {
      ++w.settling_count;
      in_image_of_settling[f(v)] = true;  // lands in the fixed set
    }
  }
  if (w.settling_count == 0) {
    return w;
  }
  std::size_t best_point = 0;
  std::size_t best_fiber = 0;
  for (std::size_t v = 0; v < f.carrier(); ++v) {
    if (in_image_of_settling[v] && fiber[v] > best_fiber) {
      best_fiber = fiber[v];
      best_point = v;
    }
  }
  w.point = static_cast<std::uint32_t>(best_point);
  w.fiber_size = best_fiber;
  if (w.fiber_size < w.pigeonhole_bound()) {
    throw std::logic_error("fiber witness fell below the pigeonhole bound");
  }
  return w;
}

}  // namespace soficlab
