#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soficlab/monoid.hpp"
#include "soficlab/rational.hpp"
#include "soficlab/transformation.hpp"

namespace soficlab {

/// A finite approximation chart: carrier {0,...,d-1}, a finite element list K
/// (labels, identity at a designated position) and one transformation per
/// element. The finite snapshot against which all quality and entropy
/// statistics are measured.
struct Chart {
  std::size_t carrier = 0;
  std::string monoid_descriptor;
  std::vector<std::string> elements;
  std::size_t identity_pos = 0;
  std::vector<Transformation> sigma;
  std::optional<std::uint64_t> seed;

  const Transformation& sigma_at(std::size_t pos) const { return sigma[pos]; }
  std::optional<std::size_t> find_element(std::string_view label) const;
};

void validate_chart(const Chart& chart);

/// Measured statistics of a chart against the monoid's multiplication.
/// Defects and separations are exact rationals; a chart "satisfies
/// (SM1)-(SM4) at level (eps, Delta)" iff this report dominates those numbers.
struct QualityReport {
  bool sm1_ok = false;
  /// max Hamming distance between sigma(k1*k2) and sigma(k1)∘sigma(k2), over
  /// pairs whose product lies in K.
  Rational sm2_defect{0};
  /// fraction of K x K pairs whose product lies in K. Low coverage means the
  /// defect was measured on few pairs; never compare reports without it.
  Rational sm2_coverage{0};
  /// min Hamming distance over distinct pairs of K (1 when |K| = 1).
  Rational sm3_separation{0};
  /// max fiber size over all sigma(k).
  std::size_t sm4_delta = 1;
  /// Injectivity of sigma on K forces |K| <= d^d; a violation here means a bug.
  bool carrier_growth_ok = true;
};

QualityReport quality(const Chart& chart, const Monoid& monoid);

std::string quality_to_json(const QualityReport& report);
/// "(SM1-SM4) at (eps=..., Delta=...) with SM2 coverage ..." on one line.
std::string quality_verdict(const QualityReport& report);

// -- constructors -----------------------------------------------------------

/// sigma(m)(v) = (v + m) mod n over (Z, +). Permutations, so sm4 = 1.
Chart cyclic_chart(std::size_t n, const std::vector<std::int64_t>& ks);

/// sigma(m)(v) = min(v + m, n-1) over (N, +). Saturation composes exactly, so
/// the defect is 0 on covered pairs while fibers pile up at n-1. Requires
/// n > max(ks).
Chart saturating_chart(std::size_t n, const std::vector<std::uint64_t>& ks);

/// Evaluation chart for the composition monoid of non-constant integer
/// polynomials: carrier F_p, sigma(P)(a) = P(a) mod p. Guarantees, re-measured
/// rather than assumed: sm4 <= max degree, separation >= 1 - maxdeg/p for
/// members that stay distinct mod p.
Chart polynomial_chart(std::uint64_t p, const std::vector<Polynomial>& ks);

/// Independent uniform permutations for the free generators; K = all words of
/// length <= maxlen; sigma(word) = composition, so the defect is 0 on covered
/// pairs by construction.
Chart random_perm_chart(std::size_t d, std::size_t generator_count, std::size_t maxlen,
                        std::uint64_t seed);

inline constexpr std::size_t kDefaultCarrierCap = 1000000;
/// Reads SOFICLAB_CARRIER_CAP, falling back to kDefaultCarrierCap.
std::size_t carrier_cap_from_env();

/// Product chart on the product carrier. All parts must list the same abstract
/// K componentwise (equal length, same identity position). The combined defect
/// obeys 1 - prod(1 - defect_i) and each product transformation's max fiber is
/// exactly the product of the component fibers; both are asserted against the
/// measured report. eps in (0,1) is the construction target.
Chart product_chart(const std::vector<Chart>& parts, const Rational& eps,
                    std::size_t carrier_cap = carrier_cap_from_env());

/// New elements all map to the identity transformation. Keeps (SM4) for the
/// original K; separation collapses to 0 (the identity now appears twice).
Chart extend_by_identity(const Chart& chart, const std::vector<std::string>& extra);

// -- certificates -----------------------------------------------------------

/// The finite-scale tension behind "no non-trivial idempotent survives":
/// for e with e^2 = e != 1, f = sigma(e) pins Delta >= ceil(|settling|/|fixed|)
/// while SM2 at (e,e) wants settling large and SM3 against 1 wants fixed small.
struct ObstructionCertificate {
  std::size_t element_pos = 0;
  std::optional<std::uint32_t> witness_point;
  std::size_t witness_fiber = 0;
  std::size_t fixed_count = 0;     // agreement mass with the identity (SM3 side)
  std::size_t settling_count = 0;  // carrier minus SM2 defect mass at (e,e)
  std::size_t implied_delta = 1;   // lower bound on sm4_delta
  Rational sm2_mass{0};            // (d - settling)/d = Hamming(sigma(e*e), sigma(e)^2)
  Rational sm3_agreement{0};       // fixed/d = 1 - Hamming(sigma(e), Id)
};

/// element_pos must name a non-trivial idempotent of the monoid.
ObstructionCertificate idempotent_obstruction(const Chart& chart, const Monoid& monoid,
                                              std::size_t element_pos);

std::string obstruction_to_json(const ObstructionCertificate& cert);

// -- stochastic search ------------------------------------------------------

struct SearchTracePoint {
  std::size_t iteration = 0;
  Rational sm2_defect{0};
  Rational sm3_separation{0};
  bool improved = false;
};

struct SearchResult {
  Chart best;
  QualityReport best_report;
  std::vector<SearchTracePoint> trace;
};

/// Local search over bicyclic charts with K = {1, p, q, qp}: random restarts
/// plus single image-entry mutations of sigma(p) and sigma(q), with
/// sigma(qp) = sigma(q)∘sigma(p). Maximizes sm3_separation subject to
/// sm2_defect <= budget; infeasible states score below all feasible ones.
/// Deterministic given the seed; restarts after 500 stagnant iterations.
SearchResult bicyclic_chart_search(std::size_t d, std::size_t iterations, std::uint64_t seed,
                                   const Rational& sm2_budget = Rational(1, 10));

// -- serialization ----------------------------------------------------------

std::string chart_to_json(const Chart& chart);
Chart chart_from_json_text(const std::string& text);
Chart load_chart(const std::string& path);
void save_chart(const Chart& chart, const std::string& path);

}  // namespace soficlab
