#pragma once

// Boundary points of tree backends (free groups and the integers) as
// eventually periodic reduced infinite words prefix . period . period . ...

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "monotile/group.hpp"

namespace monotile {

struct PeriodicRay {
  Word prefix;
  Word period;

  friend bool operator==(const PeriodicRay&, const PeriodicRay&) = default;
};

enum class Sign { plus, minus };

inline void require_tree(const GroupBackend& g, const char* what) {
  if (!g.is_tree()) {
    fail(ErrorKind::unsupported_backend,
         std::string(what) + " needs a tree backend (free or integers), got " +
             std::string(to_string(g.kind())));
  }
}

namespace detail {

// Length of the shortest p with s = p^k; s.size() when s is primitive.
inline std::size_t primitive_root_length(std::span<const Letter> s) {
  const std::size_t n = s.size();
  if (n == 0) return 0;
  std::vector<std::size_t> fail_fn(n, 0);
  for (std::size_t i = 1, k = 0; i < n; ++i) {
    while (k > 0 && s[i] != s[k]) k = fail_fn[k - 1];
    if (s[i] == s[k]) ++k;
    fail_fn[i] = k;
  }
  const std::size_t p = n - fail_fn[n - 1];
  return n % p == 0 ? p : n;
}

inline void rotate_left(std::vector<Letter>& v) {
  std::rotate(v.begin(), v.begin() + 1, v.end());
}
inline void rotate_right(std::vector<Letter>& v) {
  std::rotate(v.rbegin(), v.rbegin() + 1, v.rend());
}

}  // namespace detail

// Shortest prefix, primitive period. Two rays are the same boundary point iff
// their canonical forms are equal.
inline PeriodicRay canonicalize(const PeriodicRay& ray, const GroupBackend& g) {
  require_tree(g, "canonicalize");
  if (ray.period.empty()) fail(ErrorKind::malformed_input, "ray period must be nonempty");
  Word period = reduce(ray.period, g);
  if (period.empty()) fail(ErrorKind::degenerate_element, "ray period reduces to the identity");
  auto [u, core] = cyclic_decomposition(period, g);
  std::vector<Letter> prefix = multiply(reduce(ray.prefix, g), u, g).raw();
  std::vector<Letter> per = core.raw();

  // Absorb prefix letters that cancel against the head of the periodic part.
  while (!prefix.empty() && prefix.back() == g.invert(per.front())) {
    prefix.pop_back();
    detail::rotate_left(per);
  }
  per.resize(detail::primitive_root_length(per));
  // Pull whole-letter overlaps between the prefix tail and the period tail
  // into the periodic part.
  while (!prefix.empty() && prefix.back() == per.back()) {
    prefix.pop_back();
    detail::rotate_right(per);
  }
  return {Word(std::move(prefix)), Word(std::move(per))};
}

inline bool rays_equal(const PeriodicRay& p, const PeriodicRay& q, const GroupBackend& g) {
  return canonicalize(p, g) == canonicalize(q, g);
}

// g^{+inf} or g^{-inf}.
inline PeriodicRay lox_endpoint(const Word& w, Sign sign, const GroupBackend& g) {
  require_tree(g, "lox_endpoint");
  if (w.empty()) fail(ErrorKind::degenerate_element, "the identity has no endpoints");
  auto [u, core] = cyclic_decomposition(w, g);
  if (sign == Sign::minus) core = inverse(core, g);
  return canonicalize({u, core}, g);
}

// Left action h . p on the boundary.
inline PeriodicRay apply_boundary(const Word& h, const PeriodicRay& p, const GroupBackend& g) {
  require_tree(g, "apply_boundary");
  return canonicalize({multiply(h, p.prefix, g), p.period}, g);
}

struct FixSet {
  std::vector<PeriodicRay> points;
};

inline FixSet fix_set(const Word& w, const GroupBackend& g) {
  require_tree(g, "fix_set");
  if (w.empty()) return {};
  return {{lox_endpoint(w, Sign::plus, g), lox_endpoint(w, Sign::minus, g)}};
}

inline bool fix_contains(const FixSet& f, const PeriodicRay& p) {
  return std::find(f.points.begin(), f.points.end(), p) != f.points.end();
}

enum class FixRelation { equal, disjoint };

inline std::string_view to_string(FixRelation r) {
  return r == FixRelation::equal ? "equal" : "disjoint";
}

// Fix sets of loxodromics are either equal or disjoint; a single shared
// endpoint is reported as a consistency violation.
inline FixRelation fix_relation(const Word& x, const Word& y, const GroupBackend& g) {
  require_tree(g, "fix_relation");
  if (x.empty() || y.empty()) fail(ErrorKind::degenerate_element, "fix_relation on the identity");
  const FixSet fx = fix_set(x, g);
  const FixSet fy = fix_set(y, g);
  int shared = 0;
  for (const auto& p : fx.points) shared += fix_contains(fy, p) ? 1 : 0;
  if (shared == 2) return FixRelation::equal;
  if (shared == 0) return FixRelation::disjoint;
  fail(ErrorKind::consistency_violation,
       "fix sets share exactly one endpoint: " + format_word(x, g) + " vs " + format_word(y, g));
}

// Least N <= n_max with h g^n nontrivial for every n in [N, n_max].
// Requires h . g^{+inf} != g^{-inf}.
inline std::optional<std::size_t> lox_product_threshold(const Word& h, const Word& w,
                                                        std::size_t n_max, const GroupBackend& g) {
  require_tree(g, "lox_product_threshold");
  if (w.empty()) fail(ErrorKind::degenerate_element, "g must be nontrivial");
  if (n_max == 0) fail(ErrorKind::malformed_input, "n_max must be at least 1");
  const PeriodicRay pushed = apply_boundary(h, lox_endpoint(w, Sign::plus, g), g);
  if (pushed == lox_endpoint(w, Sign::minus, g)) {
    fail(ErrorKind::precondition, "h maps the attracting endpoint of g onto its repelling endpoint");
  }
  std::optional<std::size_t> threshold;
  Word product = h;
  for (std::size_t n = 1; n <= n_max; ++n) {
    product = multiply(product, w, g);
    if (product.empty()) {
      threshold.reset();
    } else if (!threshold) {
      threshold = n;
    }
  }
  return threshold;
}

inline std::string format_ray(const PeriodicRay& p, const GroupBackend& g) {
  const std::string prefix = p.prefix.empty() ? "" : format_word(p.prefix, g);
  return prefix + "|" + format_word(p.period, g);
}

inline PeriodicRay parse_ray(std::string_view text, const GroupBackend& g) {
  const std::size_t bar = text.find('|');
  if (bar == std::string_view::npos) fail(ErrorKind::malformed_input, "ray needs 'prefix|period'");
  return canonicalize({parse_word(text.substr(0, bar), g), parse_word(text.substr(bar + 1), g)}, g);
}

}  // namespace monotile
