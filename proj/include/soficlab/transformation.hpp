#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "soficlab/rational.hpp"

namespace soficlab {

/// A self-map of {0, ..., d-1}. Immutable once built; every operation here is
/// pure. Exact rationals only — no floats in this module.
class Transformation {
 public:
  explicit Transformation(std::vector<std::uint32_t> image);
  static Transformation identity(std::size_t d);
  static Transformation constant(std::size_t d, std::uint32_t target);

  std::size_t carrier() const { return image_.size(); }
  std::uint32_t operator()(std::size_t v) const { return image_[v]; }
  std::span<const std::uint32_t> image() const { return image_; }
  bool is_identity() const;

  bool operator==(const Transformation&) const = default;

 private:
  std::vector<std::uint32_t> image_;
};

/// f after g: (f∘g)(v) = f(g(v)). Carrier sizes must match.
Transformation compose(const Transformation& f, const Transformation& g);

/// Normalized disagreement fraction, exact in [0,1].
Rational hamming(const Transformation& f, const Transformation& g);

/// Componentwise map on the product carrier, indexed lexicographically with
/// the factor order as given (first factor most significant).
Transformation product_embed(std::span<const Transformation> factors);

/// max over v of |f^-1(v)|.
std::size_t max_fiber(const Transformation& f);

/// Pigeonhole data for a (near-)idempotent map. With
///   fixed    = {v : f(v) = v}          and
///   settling = {v : f(v) = f(f(v))}    (points whose image is fixed),
/// f maps settling into fixed, so when settling is nonempty some fixed point
/// carries a fiber of size >= ceil(|settling| / |fixed|). That point is the
/// witness; when settling is empty there is none.
struct FiberWitness {
  std::optional<std::uint32_t> point;
  std::size_t fiber_size = 0;
  std::size_t fixed_count = 0;
  std::size_t settling_count = 0;

  /// ceil(settling/fixed) when a witness exists, else 0.
  std::size_t pigeonhole_bound() const;
};

FiberWitness idempotent_fiber_witness(const Transformation& f);

}  // namespace soficlab
