#pragma once

// Test-side oracles and generators. Everything here recomputes results from
// definitions, independent of the library code paths it checks.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "soficlab/monoid.hpp"
#include "soficlab/prng.hpp"
#include "soficlab/rational.hpp"
#include "soficlab/transformation.hpp"

namespace soficlab::testing {

inline std::vector<std::size_t> z_mod_table(std::size_t n) {
  std::vector<std::size_t> table(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      table[i * n + j] = (i + j) % n;
    }
  }
  return table;
}

/// Multiplicative {0,1}: identity 1, zero 0.
inline std::vector<std::size_t> bool_table() { return {0, 0, 0, 1}; }

/// Map({0,1}) under composition; element i encodes the image pair
/// (i >> 1, i & 1), so 1 = id, 0/3 = constants, 2 = swap.
inline std::vector<std::size_t> map2_table() {
  auto apply = [](std::size_t f, std::size_t v) { return v == 0 ? (f >> 1) : (f & 1); };
  std::vector<std::size_t> table(16);
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t g = 0; g < 4; ++g) {
      const std::size_t image0 = apply(f, apply(g, 0));
      const std::size_t image1 = apply(f, apply(g, 1));
      table[f * 4 + g] = image0 * 2 + image1;
    }
  }
  return table;
}

/// Reduces a word over {p,q} by the rewriting rule pq -> 1 to a fixed point.
inline std::string rewrite_pq(std::string word) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      if (word[i] == 'p' && word[i + 1] == 'q') {
        word.erase(i, 2);
        changed = true;
        break;
      }
    }
  }
  return word;
}

/// All words over {p,q} up to the given length, shortest first.
inline std::vector<std::string> pq_words(std::size_t max_len) {
  std::vector<std::string> words{""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = words.size();
    for (std::size_t i = begin; i < end; ++i) {
      words.push_back(words[i] + "p");
      words.push_back(words[i] + "q");
    }
    begin = end;
  }
  return words;
}

/// Identity-fixed enumeration of all monoid tables of the given order,
/// deduplicated up to isomorphism (relabelings fix the identity 0).
inline std::vector<std::vector<std::size_t>> monoids_up_to_iso(std::size_t n) {
  std::vector<std::vector<std::size_t>> found;
  std::set<std::vector<std::size_t>> canon_seen;
  const std::size_t free_cells = (n - 1) * (n - 1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < free_cells; ++i) total *= n;

  std::vector<std::size_t> perm(n);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> table(n * n);
    for (std::size_t j = 0; j < n; ++j) {
      table[j] = j;          // 0 * j = j
      table[j * n] = j;      // j * 0 = j
    }
    std::size_t acc = code;
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 1; j < n; ++j) {
        table[i * n + j] = acc % n;
        acc /= n;
      }
    }
    bool associative = true;
    for (std::size_t i = 0; i < n && associative; ++i) {
      for (std::size_t j = 0; j < n && associative; ++j) {
        for (std::size_t k = 0; k < n && associative; ++k) {
          associative = table[table[i * n + j] * n + k] == table[i * n + table[j * n + k]];
        }
      }
    }
    if (!associative) continue;

    // canonical form: min over relabelings of {1,...,n-1}
    std::vector<std::size_t> canon = table;
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::sort(perm.begin() + 1, perm.end());
    do {
      std::vector<std::size_t> relabeled(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          relabeled[perm[i] * n + perm[j]] = perm[table[i * n + j]];
        }
      }
      canon = std::min(canon, relabeled);
    } while (std::next_permutation(perm.begin() + 1, perm.end()));

    if (canon_seen.insert(canon).second) {
      found.push_back(canon);
    }
  }
  return found;
}

/// Random idempotent self-map: fixes a chosen image set, maps the rest into it.
inline Transformation random_idempotent(Rng& rng, std::size_t d) {
  const std::size_t image_size = 1 + uniform_below(rng, d);
  std::vector<std::uint32_t> points = random_permutation(rng, d);
  std::vector<std::uint32_t> image(d);
  for (std::size_t i = 0; i < image_size; ++i) {
    image[points[i]] = points[i];
  }
  for (std::size_t i = image_size; i < d; ++i) {
    image[points[i]] = points[uniform_below(rng, image_size)];
  }
  return Transformation(std::move(image));
}

/// Naive full-microstate enumeration: the independent counting oracle.
/// Recomputes defects straight from the defect-set definition.
inline BigInt naive_trace_count(const std::vector<std::vector<std::uint32_t>>& language,
                                const std::vector<std::vector<std::uint32_t>>& f_images,
                                const std::vector<std::size_t>& f_window_index,
                                std::size_t carrier, std::int64_t budget) {
  std::set<std::vector<std::uint32_t>> traces;
  const std::size_t lang_size = language.size();
  std::vector<std::uint32_t> ids(carrier, 0);
  while (true) {
    std::vector<std::uint32_t> trace(carrier);
    for (std::size_t v = 0; v < carrier; ++v) {
      trace[v] = language[ids[v]][0];
    }
    bool good = true;
    for (std::size_t j = 0; j < f_images.size() && good; ++j) {
      std::int64_t defects = 0;
      for (std::size_t v = 0; v < carrier; ++v) {
        if (trace[f_images[j][v]] != language[ids[v]][f_window_index[j]]) {
          ++defects;
        }
      }
      good = defects <= budget;
    }
    if (good) {
      traces.insert(std::move(trace));
    }
    std::size_t pos = 0;
    while (pos < carrier && ++ids[pos] == lang_size) {
      ids[pos] = 0;
      ++pos;
    }
    if (pos == carrier) break;
  }
  return BigInt(traces.size());
}

}  // namespace soficlab::testing
