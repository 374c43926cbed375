#include "soficlab/monoid.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

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

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::int64_t parse_int(std::string_view text, const char* what) {
  const std::string t = strip(text);
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(t, &used);
    if (used != t.size()) {
      throw std::invalid_argument("");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + t + "'");
  }
}

}  // namespace

// -- polynomials -------------------------------------------------------------

Polynomial::Polynomial(std::vector<BigInt> c) : coeffs(std::move(c)) {
  while (!coeffs.empty() && coeffs.back() == 0) {
    coeffs.pop_back();
  }
}

int Polynomial::degree() const { return static_cast<int>(coeffs.size()) - 1; }

Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
  std::vector<BigInt> out(std::max(a.coeffs.size(), b.coeffs.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i < a.coeffs.size()) out[i] += a.coeffs[i];
    if (i < b.coeffs.size()) out[i] += b.coeffs[i];
  }
  return Polynomial(std::move(out));
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs.empty() || b.coeffs.empty()) {
    return Polynomial();
  }
  std::vector<BigInt> out(a.coeffs.size() + b.coeffs.size() - 1);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) {
      out[i + j] += a.coeffs[i] * b.coeffs[j];
    }
  }
  return Polynomial(std::move(out));
}

Polynomial poly_compose(const Polynomial& a, const Polynomial& b) {
  // Horner: a(b) = (...(c_n b + c_{n-1}) b + ...) + c_0
  Polynomial acc;
  for (std::size_t i = a.coeffs.size(); i-- > 0;) {
    acc = poly_mul(acc, b);
    acc = poly_add(acc, Polynomial({a.coeffs[i]}));
  }
  return acc;
}

std::string poly_to_string(const Polynomial& p) {
  if (p.coeffs.empty()) {
    return "0";
  }
  std::string out;
  for (std::size_t i = p.coeffs.size(); i-- > 0;) {
    const BigInt& c = p.coeffs[i];
    if (c == 0) continue;
    const bool negative = c < 0;
    const BigInt mag = negative ? BigInt(-c) : c;
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? "-" : "+";
    }
    if (i == 0 || mag != 1) {
      out += mag.str();
    }
    if (i >= 1) {
      out += "X";
      if (i >= 2) {
        out += "^" + std::to_string(i);
      }
    }
  }
  return out.empty() ? "0" : out;
}

Polynomial poly_parse(std::string_view text) {
  std::string t;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  }
  if (t.empty()) {
    throw std::invalid_argument("empty polynomial");
  }
  std::vector<BigInt> coeffs;
  std::size_t pos = 0;
  while (pos < t.size()) {
    BigInt sign = 1;
    if (t[pos] == '+' || t[pos] == '-') {
      if (t[pos] == '-') sign = -1;
      ++pos;
    } else if (pos != 0) {
      throw std::invalid_argument("expected '+' or '-' in polynomial: " + t);
    }
    std::string digits;
    while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) {
      digits += t[pos++];
    }
    BigInt coeff = digits.empty() ? BigInt(1) : BigInt(digits);
    std::size_t exponent = 0;
    if (pos < t.size() && (t[pos] == 'X' || t[pos] == 'x')) {
      ++pos;
      exponent = 1;
      if (pos < t.size() && t[pos] == '^') {
        ++pos;
        std::string expd;
        while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) {
          expd += t[pos++];
        }
        if (expd.empty()) {
          throw std::invalid_argument("missing exponent in polynomial: " + t);
        }
        exponent = std::stoull(expd);
      }
    } else if (digits.empty()) {
      throw std::invalid_argument("bad term in polynomial: " + t);
    }
    if (coeffs.size() <= exponent) {
      coeffs.resize(exponent + 1);
    }
    coeffs[exponent] += sign * coeff;
  }
  return Polynomial(std::move(coeffs));
}

// -- bicyclic ----------------------------------------------------------------

BicyclicElement bicyclic_multiply(const BicyclicElement& x, const BicyclicElement& y) {
  const std::uint64_t t = std::min(x.p_power, y.q_power);
  return BicyclicElement{x.q_power + y.q_power - t, x.p_power + y.p_power - t};
}

namespace {

std::string bicyclic_to_string(const BicyclicElement& e) {
  if (e.q_power == 0 && e.p_power == 0) {
    return "1";
  }
  std::string out;
  if (e.q_power > 0) {
    out += "q";
    if (e.q_power > 1) out += "^" + std::to_string(e.q_power);
  }
  if (e.p_power > 0) {
    if (!out.empty()) out += " ";
    out += "p";
    if (e.p_power > 1) out += "^" + std::to_string(e.p_power);
  }
  return out;
}

BicyclicElement bicyclic_parse(std::string_view label) {
  std::string t;
  for (char ch : label) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  }
  if (t == "1") {
    return BicyclicElement{};
  }
  BicyclicElement e;
  std::size_t pos = 0;
  auto read_power = [&](char letter) -> std::uint64_t {
    if (pos >= t.size() || t[pos] != letter) return 0;
    ++pos;
    if (pos < t.size() && t[pos] == '^') {
      ++pos;
      std::string digits;
      while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos]))) {
        digits += t[pos++];
      }
      if (digits.empty()) {
        throw std::invalid_argument("bad bicyclic label: " + std::string(label));
      }
      return std::stoull(digits);
    }
    return 1;
  };
  e.q_power = read_power('q');
  e.p_power = read_power('p');
  if (pos != t.size() || (e.q_power == 0 && e.p_power == 0)) {
    throw std::invalid_argument("bad bicyclic label: " + std::string(label));
  }
  return e;
}

// -- concrete monoids --------------------------------------------------------

class IntegerAddMonoid final : public Monoid {
 public:
  explicit IntegerAddMonoid(bool natural)
      : Monoid(natural ? "nat-add" : "int-add"), natural_(natural) {}

  Element identity() const override { return Element{std::int64_t{0}}; }

  Element multiply(const Element& x, const Element& y) const override {
    return Element{value(x) + value(y)};
  }

  std::string format(const Element& e) const override { return std::to_string(value(e)); }

  Element parse(std::string_view label) const override {
    const std::int64_t v = parse_int(label, "integer element");
    if (natural_ && v < 0) {
      throw std::invalid_argument("nat-add element must be nonnegative");
    }
    return Element{v};
  }

 private:
  std::int64_t value(const Element& e) const {
    const auto* v = std::get_if<std::int64_t>(&e.value);
    if (v == nullptr || (natural_ && *v < 0)) {
      throw std::invalid_argument("not an element of " + descriptor());
    }
    return *v;
  }

  bool natural_;
};

class BicyclicMonoid final : public Monoid {
 public:
  BicyclicMonoid() : Monoid("bicyclic") {}

  Element identity() const override { return Element{BicyclicElement{}}; }

  Element multiply(const Element& x, const Element& y) const override {
    return Element{bicyclic_multiply(value(x), value(y))};
  }

  std::string format(const Element& e) const override { return bicyclic_to_string(value(e)); }

  Element parse(std::string_view label) const override { return Element{bicyclic_parse(label)}; }

 private:
  const BicyclicElement& value(const Element& e) const {
    const auto* v = std::get_if<BicyclicElement>(&e.value);
    if (v == nullptr) {
      throw std::invalid_argument("not a bicyclic element");
    }
    return *v;
  }
};

class PolyCompositionMonoid final : public Monoid {
 public:
  PolyCompositionMonoid() : Monoid("polyZ") {}

  Element identity() const override {
    return Element{Polynomial({BigInt(0), BigInt(1)})};  // X
  }

  Element multiply(const Element& x, const Element& y) const override {
    return Element{poly_compose(value(x), value(y))};
  }

  std::string format(const Element& e) const override { return poly_to_string(value(e)); }

  Element parse(std::string_view label) const override {
    Polynomial p = poly_parse(label);
    if (p.is_constant()) {
      throw std::invalid_argument("constant polynomial is not an element of polyZ: " +
                                  std::string(label));
    }
    return Element{std::move(p)};
  }

 private:
  const Polynomial& value(const Element& e) const {
    const auto* v = std::get_if<Polynomial>(&e.value);
    if (v == nullptr || v->is_constant()) {
      throw std::invalid_argument("not a non-constant integer polynomial");
    }
    return *v;
  }
};

class FreeMonoid final : public Monoid {
 public:
  explicit FreeMonoid(std::size_t rank)
      : Monoid("free:" + std::to_string(rank)), rank_(rank) {
    if (rank_ < 1 || rank_ > 26) {
      throw std::invalid_argument("free monoid rank must be in 1..26");
    }
  }

  Element identity() const override { return Element{std::string()}; }

  Element multiply(const Element& x, const Element& y) const override {
    return Element{value(x) + value(y)};
  }

  std::string format(const Element& e) const override {
    const std::string& w = value(e);
    return w.empty() ? "1" : w;
  }

  Element parse(std::string_view label) const override {
    const std::string t = strip(label);
    if (t == "1") {
      return identity();
    }
    for (char ch : t) {
      if (ch < 'a' || ch >= static_cast<char>('a' + rank_)) {
        throw std::invalid_argument("bad free-monoid word: " + t);
      }
    }
    return Element{t};
  }

 private:
  const std::string& value(const Element& e) const {
    const auto* v = std::get_if<std::string>(&e.value);
    if (v == nullptr) {
      throw std::invalid_argument("not a free-monoid word");
    }
    return *v;
  }

  std::size_t rank_;
};

class ProductMonoid final : public Monoid {
 public:
  ProductMonoid(std::string descriptor, std::vector<MonoidPtr> parts)
      : Monoid(std::move(descriptor)), parts_(std::move(parts)) {
    if (parts_.empty()) {
      throw std::invalid_argument("product monoid needs at least one factor");
    }
  }

  Element identity() const override {
    ElementTuple tuple;
    tuple.reserve(parts_.size());
    for (const auto& part : parts_) {
      tuple.push_back(part->identity());
    }
    return Element{std::move(tuple)};
  }

  Element multiply(const Element& x, const Element& y) const override {
    const ElementTuple& a = value(x);
    const ElementTuple& b = value(y);
    ElementTuple tuple;
    tuple.reserve(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      tuple.push_back(parts_[i]->multiply(a[i], b[i]));
    }
    return Element{std::move(tuple)};
  }

  std::string format(const Element& e) const override {
    const ElementTuple& tuple = value(e);
    std::string out = "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i > 0) out += "|";
      out += parts_[i]->format(tuple[i]);
    }
    return out + ")";
  }

  Element parse(std::string_view label) const override {
    const std::string t = strip(label);
    if (t.size() < 2 || t.front() != '(' || t.back() != ')') {
      throw std::invalid_argument("product element label must be (a|b|...): " + t);
    }
    std::vector<std::string> pieces;
    int depth = 0;
    std::string cur;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      const char ch = t[i];
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == '|' && depth == 0) {
        pieces.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    pieces.push_back(cur);
    if (pieces.size() != parts_.size()) {
      throw std::invalid_argument("product element arity mismatch: " + t);
    }
    ElementTuple tuple;
    tuple.reserve(parts_.size());
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      tuple.push_back(parts_[i]->parse(pieces[i]));
    }
    return Element{std::move(tuple)};
  }

 private:
  const ElementTuple& value(const Element& e) const {
    const auto* v = std::get_if<ElementTuple>(&e.value);
    if (v == nullptr || v->size() != parts_.size()) {
      throw std::invalid_argument("not an element of " + descriptor());
    }
    return *v;
  }

  std::vector<MonoidPtr> parts_;
};

}  // namespace

// -- finite monoid -----------------------------------------------------------

FiniteMonoid::FiniteMonoid(std::size_t order, std::vector<std::size_t> table)
    : Monoid("finite"), order_(order), table_(std::move(table)), identity_(order) {
  if (order_ == 0) {
    throw std::invalid_argument("finite monoid must be nonempty");
  }
  if (table_.size() != order_ * order_) {
    throw std::invalid_argument("finite monoid table must be n*n");
  }
  for (std::size_t v : table_) {
    if (v >= order_) {
      throw std::invalid_argument("finite monoid table entry out of range");
    }
  }
  for (std::size_t e = 0; e < order_; ++e) {
    bool ok = true;
    for (std::size_t j = 0; j < order_ && ok; ++j) {
      ok = mul(e, j) == j && mul(j, e) == j;
    }
    if (ok) {
      identity_ = e;
      break;
    }
  }
  if (identity_ == order_) {
    throw std::invalid_argument("finite monoid table has no identity element");
  }
  if (order_ <= 64) {
    for (std::size_t i = 0; i < order_; ++i) {
      for (std::size_t j = 0; j < order_; ++j) {
        for (std::size_t k = 0; k < order_; ++k) {
          if (mul(mul(i, j), k) != mul(i, mul(j, k))) {
            throw std::invalid_argument("finite monoid table is not associative at (" +
                                        std::to_string(i) + "," + std::to_string(j) + "," +
                                        std::to_string(k) + ")");
          }
        }
      }
    }
  }
}

Element FiniteMonoid::identity() const {
  return Element{static_cast<std::int64_t>(identity_)};
}

Element FiniteMonoid::multiply(const Element& x, const Element& y) const {
  const auto* a = std::get_if<std::int64_t>(&x.value);
  const auto* b = std::get_if<std::int64_t>(&y.value);
  if (a == nullptr || b == nullptr || *a < 0 || *b < 0 ||
      static_cast<std::size_t>(*a) >= order_ || static_cast<std::size_t>(*b) >= order_) {
    throw std::invalid_argument("not an element of the finite monoid");
  }
  return Element{static_cast<std::int64_t>(mul(static_cast<std::size_t>(*a),
                                               static_cast<std::size_t>(*b)))};
}

std::string FiniteMonoid::format(const Element& e) const {
  const auto* v = std::get_if<std::int64_t>(&e.value);
  if (v == nullptr || *v < 0 || static_cast<std::size_t>(*v) >= order_) {
    throw std::invalid_argument("not an element of the finite monoid");
  }
  return std::to_string(*v);
}

Element FiniteMonoid::parse(std::string_view label) const {
  const std::int64_t v = parse_int(label, "finite monoid element");
  if (v < 0 || static_cast<std::size_t>(v) >= order_) {
    throw std::invalid_argument("finite monoid element out of range: " + std::string(label));
  }
  return Element{v};
}

namespace {

bool has_two_sided_inverse(const FiniteMonoid& m, std::size_t a) {
  for (std::size_t b = 0; b < m.order(); ++b) {
    if (m.mul(a, b) == m.identity_index() && m.mul(b, a) == m.identity_index()) {
      return true;
    }
  }
  return false;
}

std::size_t power(const FiniteMonoid& m, std::size_t a, std::size_t k) {
  std::size_t acc = m.identity_index();
  for (std::size_t i = 0; i < k; ++i) {
    acc = m.mul(acc, a);
  }
  return acc;
}

// e = a^{mt} from the eventual period a^m = a^{m+t} of a non-invertible a.
std::size_t frobenius_idempotent(const FiniteMonoid& m, std::size_t a) {
  std::vector<std::size_t> seen_at(m.order(), 0);  // 0 = unseen; stores exponent+1
  std::size_t current = a;
  for (std::size_t exp = 1;; ++exp) {
    if (seen_at[current] != 0) {
      const std::size_t first = seen_at[current] - 1;
      const std::size_t period = exp - first;
      return power(m, a, first * period);
    }
    seen_at[current] = exp + 1;
    current = m.mul(current, a);
    if (exp > m.order() + 1) {
      throw std::logic_error("power sequence failed to cycle");
    }
  }
}

}  // namespace

std::optional<std::size_t> find_nontrivial_idempotent(const FiniteMonoid& m) {
  std::optional<std::size_t> scanned;
  for (std::size_t e = 0; e < m.order(); ++e) {
    if (e != m.identity_index() && m.mul(e, e) == e) {
      scanned = e;
      break;
    }
  }
  // cross-check: every non-invertible element yields one via its eventual period
  bool any_noninvertible = false;
  for (std::size_t a = 0; a < m.order(); ++a) {
    if (has_two_sided_inverse(m, a)) continue;
    any_noninvertible = true;
    const std::size_t e = frobenius_idempotent(m, a);
    if (m.mul(e, e) != e || e == m.identity_index()) {
      throw std::logic_error("idempotent derivation disagrees with the table scan");
    }
  }
  if (scanned.has_value() != any_noninvertible) {
    throw std::logic_error("idempotent scan and invertibility sweep disagree");
  }
  return scanned;
}

bool is_group(const FiniteMonoid& m) {
  for (std::size_t a = 0; a < m.order(); ++a) {
    if (!has_two_sided_inverse(m, a)) {
      return false;
    }
  }
  return true;
}

std::shared_ptr<const FiniteMonoid> finite_monoid_from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const std::size_t n = j.at("n").get<std::size_t>();
  std::vector<std::size_t> table;
  table.reserve(n * n);
  for (const auto& row : j.at("table")) {
    for (const auto& cell : row) {
      table.push_back(cell.get<std::size_t>());
    }
  }
  auto monoid = std::make_shared<const FiniteMonoid>(n, std::move(table));
  if (j.contains("identity") &&
      j.at("identity").get<std::size_t>() != monoid->identity_index()) {
    throw std::invalid_argument("declared identity disagrees with the table");
  }
  return monoid;
}

// -- descriptor grammar ------------------------------------------------------

MonoidPtr make_monoid(const std::string& descriptor) {
  const std::string d = strip(descriptor);
  if (d == "nat-add") return std::make_shared<IntegerAddMonoid>(true);
  if (d == "int-add") return std::make_shared<IntegerAddMonoid>(false);
  if (d == "bicyclic") return std::make_shared<BicyclicMonoid>();
  if (d == "polyZ") return std::make_shared<PolyCompositionMonoid>();
  if (d.rfind("free:", 0) == 0) {
    return std::make_shared<FreeMonoid>(
        static_cast<std::size_t>(parse_int(d.substr(5), "free monoid rank")));
  }
  if (d.rfind("finite:", 0) == 0) {
    return finite_monoid_from_json_text(read_file(d.substr(7)));
  }
  if (d.rfind("product(", 0) == 0 && d.back() == ')') {
    const std::string inner = d.substr(8, d.size() - 9);
    std::vector<std::string> pieces;
    int depth = 0;
    std::string cur;
    for (char ch : inner) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == ',' && depth == 0) {
        pieces.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    pieces.push_back(cur);
    std::vector<MonoidPtr> parts;
    parts.reserve(pieces.size());
    for (const auto& piece : pieces) {
      parts.push_back(make_monoid(piece));
    }
    return std::make_shared<ProductMonoid>(d, std::move(parts));
  }
  throw std::invalid_argument("unknown monoid descriptor: " + d);
}

// -- fragments ---------------------------------------------------------------

MonoidFragment::MonoidFragment(MonoidPtr monoid, std::vector<Element> elements, bool covers)
    : monoid_(std::move(monoid)), elements_(std::move(elements)), covers_monoid_(covers) {
  labels_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    std::string label = monoid_->format(elements_[i]);
    if (!index_.emplace(label, i).second) {
      throw std::invalid_argument("fragment has duplicate element: " + label);
    }
    labels_.push_back(std::move(label));
  }
  const auto id = index_.find(monoid_->format(monoid_->identity()));
  if (id == index_.end()) {
    throw std::invalid_argument("fragment must contain the identity");
  }
  identity_pos_ = id->second;
}

MonoidFragment MonoidFragment::close(MonoidPtr monoid, const std::vector<Element>& generators,
                                     std::size_t radius, std::size_t cap) {
  std::vector<Element> elements{monoid->identity()};
  std::unordered_map<std::string, std::size_t> seen{{monoid->format(elements[0]), 0}};
  std::vector<std::size_t> frontier{0};
  for (std::size_t step = 0; step < radius && !frontier.empty(); ++step) {
    std::vector<std::size_t> next;
    for (std::size_t pos : frontier) {
      for (const Element& g : generators) {
        Element product = monoid->multiply(elements[pos], g);
        std::string label = monoid->format(product);
        if (seen.emplace(label, elements.size()).second) {
          if (elements.size() >= cap) {
            throw CapExceededError("fragment cap exceeded: " + std::to_string(cap));
          }
          next.push_back(elements.size());
          elements.push_back(std::move(product));
        }
      }
    }
    frontier = std::move(next);
  }
  return MonoidFragment(std::move(monoid), std::move(elements), false);
}

MonoidFragment MonoidFragment::whole(std::shared_ptr<const FiniteMonoid> monoid) {
  std::vector<Element> elements;
  elements.reserve(monoid->order());
  for (std::size_t i = 0; i < monoid->order(); ++i) {
    elements.push_back(Element{static_cast<std::int64_t>(i)});
  }
  return MonoidFragment(std::move(monoid), std::move(elements), true);
}

MonoidFragment MonoidFragment::from_labels(MonoidPtr monoid,
                                           const std::vector<std::string>& labels) {
  std::vector<Element> elements;
  const std::string id_label = monoid->format(monoid->identity());
  if (std::find(labels.begin(), labels.end(), id_label) == labels.end()) {
    elements.push_back(monoid->identity());
  }
  for (const auto& label : labels) {
    elements.push_back(monoid->parse(label));
  }
  return MonoidFragment(std::move(monoid), std::move(elements), false);
}

std::optional<std::size_t> MonoidFragment::find(std::string_view label) const {
  const auto it = index_.find(std::string(label));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<std::size_t> MonoidFragment::product(std::size_t i, std::size_t j) const {
  return find(monoid_->format(monoid_->multiply(elements_[i], elements_[j])));
}

}  // namespace soficlab
