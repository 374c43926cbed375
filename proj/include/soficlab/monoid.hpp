#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "soficlab/rational.hpp"

namespace soficlab {

/// Integer polynomial, coefficient of X^i at coeffs[i]. Arbitrary-precision
/// coefficients: composition degree grows multiplicatively and products of
/// coefficients overflow fixed width fast.
struct Polynomial {
  std::vector<BigInt> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<BigInt> c);

  /// -1 for the zero polynomial.
  int degree() const;
  bool is_constant() const { return degree() <= 0; }

  bool operator==(const Polynomial&) const = default;
};

Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
/// a(b(X)), by Horner over polynomials.
Polynomial poly_compose(const Polynomial& a, const Polynomial& b);
std::string poly_to_string(const Polynomial& p);
Polynomial poly_parse(std::string_view text);

/// Exponent pair (a, b) for the normal form q^a p^b. (0,0) is the identity.
struct BicyclicElement {
  std::uint64_t q_power = 0;
  std::uint64_t p_power = 0;
  bool operator==(const BicyclicElement&) const = default;
};

/// Normal-form product: (a,b)(c,d) = (a+c-t, b+d-t), t = min(b,c). Derived
/// once from pq = 1 and locked by the free-word rewriting oracle test.
BicyclicElement bicyclic_multiply(const BicyclicElement& x, const BicyclicElement& y);

struct Element;
using ElementTuple = std::vector<Element>;

/// One value type shared by all concrete monoids. Which alternative is live
/// is fixed by the monoid a value belongs to.
struct Element {
  std::variant<std::int64_t,      // nat-add / int-add / finite table index
               BicyclicElement,   // bicyclic normal form
               std::string,       // free-monoid word ("" = identity)
               Polynomial,        // polyZ composition monoid
               ElementTuple>      // product monoid
      value;

  bool operator==(const Element&) const = default;
};

class FiniteMonoid;

/// A concrete monoid: identity, multiplication, and a canonical label per
/// element. Labels are the stable identity used by fragments, chart files and
/// SFT supports. Implementations are immutable and safe to share.
class Monoid {
 public:
  virtual ~Monoid() = default;

  const std::string& descriptor() const { return descriptor_; }

  virtual Element identity() const = 0;
  /// Throws std::invalid_argument if either operand is not a valid element.
  virtual Element multiply(const Element& x, const Element& y) const = 0;
  virtual std::string format(const Element& e) const = 0;
  virtual Element parse(std::string_view label) const = 0;

  virtual const FiniteMonoid* as_finite() const { return nullptr; }

 protected:
  explicit Monoid(std::string descriptor) : descriptor_(std::move(descriptor)) {}

 private:
  std::string descriptor_;
};

using MonoidPtr = std::shared_ptr<const Monoid>;

/// Explicit multiplication table. Construction checks the identity laws and,
/// for order <= 64, associativity on all triples; a violation names the triple.
class FiniteMonoid : public Monoid {
 public:
  FiniteMonoid(std::size_t order, std::vector<std::size_t> table);

  std::size_t order() const { return order_; }
  std::size_t mul(std::size_t i, std::size_t j) const { return table_[i * order_ + j]; }
  std::size_t identity_index() const { return identity_; }

  Element identity() const override;
  Element multiply(const Element& x, const Element& y) const override;
  std::string format(const Element& e) const override;
  Element parse(std::string_view label) const override;
  const FiniteMonoid* as_finite() const override { return this; }

 private:
  std::size_t order_;
  std::vector<std::size_t> table_;
  std::size_t identity_;
};

/// Some e with e*e = e and e != 1, if any. Scans the table and cross-checks
/// against the eventual-period derivation e = a^{mt} from any non-invertible a;
/// the two routes must agree.
std::optional<std::size_t> find_nontrivial_idempotent(const FiniteMonoid& m);

/// True iff every element has a two-sided inverse. Agrees with emptiness of
/// find_nontrivial_idempotent on every input.
bool is_group(const FiniteMonoid& m);

/// Parses a descriptor:
///   finite:<path>            explicit table from a JSON file
///   bicyclic                 <p, q : pq = 1>
///   polyZ                    non-constant integer polynomials under composition
///   free:<k>                 free monoid on k generators a, b, c, ...
///   nat-add | int-add        (N, +) / (Z, +)
///   product(<desc>,...)      direct product, componentwise
MonoidPtr make_monoid(const std::string& descriptor);

/// FiniteMonoid from a JSON value {"n": int, "table": [[...]], "identity"?: int}.
std::shared_ptr<const FiniteMonoid> finite_monoid_from_json_text(const std::string& text);

inline constexpr std::size_t kDefaultFragmentCap = 100000;

/// Finite window onto a monoid: a list of distinct elements containing the
/// identity, with in-window products resolvable by label. The only way
/// infinite monoids are ever touched.
class MonoidFragment {
 public:
  /// Identity plus all products of at most `radius` generators, breadth-first,
  /// generator order as given. Deterministic; throws CapExceededError with the
  /// cap value when the window outgrows `cap`.
  static MonoidFragment close(MonoidPtr monoid, const std::vector<Element>& generators,
                              std::size_t radius, std::size_t cap = kDefaultFragmentCap);

  /// The whole monoid, for finite tables.
  static MonoidFragment whole(std::shared_ptr<const FiniteMonoid> monoid);

  /// Exactly the listed labels (identity added in front if missing).
  static MonoidFragment from_labels(MonoidPtr monoid, const std::vector<std::string>& labels);

  const Monoid& monoid() const { return *monoid_; }
  MonoidPtr monoid_ptr() const { return monoid_; }
  std::size_t size() const { return elements_.size(); }
  const Element& element(std::size_t i) const { return elements_[i]; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  std::size_t identity_pos() const { return identity_pos_; }
  /// True when the fragment is the entire (finite) monoid, so every translate
  /// resolves and admissibility can be computed exactly.
  bool covers_monoid() const { return covers_monoid_; }

  std::optional<std::size_t> find(std::string_view label) const;
  /// i*j as a fragment position, or nullopt when the product falls outside.
  std::optional<std::size_t> product(std::size_t i, std::size_t j) const;

 private:
  MonoidFragment(MonoidPtr monoid, std::vector<Element> elements, bool covers);

  MonoidPtr monoid_;
  std::vector<Element> elements_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t identity_pos_ = 0;
  bool covers_monoid_ = false;
};

struct CapExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace soficlab
