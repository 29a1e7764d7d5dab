#pragma once

// Tile construction for T = F u {z}: the pairing of C = {x : |x z^-1| < |x| + r}
// along v^-1 z, the A-stage tiles s v^-1 T, and the greedy fill with tiles
// g z^-1 T, all restricted to a finite ball.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "monotile/boundary.hpp"
#include "monotile/group.hpp"
#include "monotile/swinger.hpp"

namespace monotile {

struct TileSpec {
  bool trivial = false;
  std::vector<Word> input;  // F as given, normalized and shortlex sorted
  Word translation;         // F = translation^-1 * input
  std::vector<Word> F;      // shortlex sorted, contains the identity
  Word v;
  std::size_t M = 0;
  std::size_t r = 0;
  std::size_t R = 0;
  Word z;
  std::vector<Word> T;  // F followed by z
  std::optional<SwingerCertificate> certificate;
};

struct TrivialTile {
  Word element;
};

using PreparedTile = std::variant<TrivialTile, TileSpec>;

inline std::size_t separation_constant(std::size_t r, double delta) {
  return 2 * r + static_cast<std::size_t>(std::ceil(4.0 * delta));
}

namespace detail {

inline std::vector<Word> normalize_set(const std::vector<Word>& raw, const GroupBackend& g) {
  std::vector<Word> out;
  for (const Word& w : raw) out.push_back(reduce(w, g));
  std::sort(out.begin(), out.end(), shortlex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Powers up to 16 pairwise distinct with strictly growing length.
inline bool powers_grow(const Word& w, const GroupBackend& g) {
  if (w.empty()) return false;
  Word p = w;
  for (int k = 2; k <= 16; ++k) {
    Word next = multiply(p, w, g);
    if (next.size() <= p.size()) return false;
    p = std::move(next);
  }
  return true;
}

inline TileSpec trivial_spec(const std::vector<Word>& input, const GroupBackend& g) {
  TileSpec spec;
  spec.trivial = true;
  spec.input = input;
  spec.translation = input.front();
  spec.F = {Word{}};
  spec.T = {Word{}};
  (void)g;
  return spec;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// D-separation

struct SeparationResult {
  std::size_t radius = 0;  // SIZE_MAX: the whole group
  std::uint64_t members = 0;  // |D ∩ Ball(radius)|, saturating; 0 for the whole group
  // Ordered pairs (x, y) of members with 1 <= d(x, y) < r, counted over the
  // members x of length <= k + r - 1 (tree backends) or all members (others).
  // Zero iff D ∩ Ball(radius) is r-separated.
  std::size_t violations = 0;
  std::optional<std::pair<Word, Word>> witness;

  bool separated() const { return violations == 0; }
};

namespace detail {

inline bool in_D(const Word& x, const Word& z, std::size_t r, const GroupBackend& g) {
  const auto bound = x.size() + r;
  return multiply(x, inverse(z, g), g).size() < bound || multiply(x, z, g).size() < bound;
}

// Tree backends. x is in D iff x ends with sigma_+ or sigma_-, the last
// k = max(0, ceil((|z| - r + 1) / 2)) letters of z and z^-1. Whether x has a
// D-neighbour y = x b, 1 <= |b| < r, depends only on the last k + r - 1
// letters of x and, inside Ball(n), on |x| through |y| <= n; shortening x to
// that window only helps |y| <= n. So members of length <= k + r - 1 are
// enough, and the neighbours of each are walked letter by letter.
class TreeSeparation {
 public:
  TreeSeparation(const Word& z, std::size_t r, std::size_t n, const GroupBackend& g)
      : g_(g), r_(r), n_(n), alphabet_size_(2 * g.generator_count()) {
    const auto L = static_cast<std::int64_t>(z.size());
    const auto rr = static_cast<std::int64_t>(r);
    k_ = static_cast<std::size_t>(std::max<std::int64_t>(0, (L - rr + 2) / 2));
    sigma_[0] = encode(z, z.size() - k_);
    const Word z_inv = inverse(z, g);
    sigma_[1] = encode(z_inv, z_inv.size() - k_);
  }

  SeparationResult run() {
    SeparationResult result;
    result.radius = n_;
    if (n_ != SIZE_MAX) result.members = count_members();
    if (n_ < k_ || r_ <= 1) return result;
    const std::size_t window = k_ + r_ - 1;
    const std::size_t x_max = std::min(n_, window);
    const int families = sigma_[0] == sigma_[1] ? 1 : 2;
    for (int f = 0; f < families; ++f) {
      const Word sigma = decode(sigma_[f]);
      for_each_in_ball(x_max - k_, g_, [&](const Word& p) {
        if (!p.empty() && !sigma.empty() && p.back() == g_.invert(sigma.front())) return true;
        std::vector<Letter> letters = p.raw();
        letters.insert(letters.end(), sigma.raw().begin(), sigma.raw().end());
        const Word x(std::move(letters));
        if (f == 1 && ends_with(encode(x, 0), sigma_[0])) return true;
        std::vector<std::uint8_t> y = encode(x, 0);
        walk(x, y, r_ - 1, -1, result);
        return true;
      });
    }
    return result;
  }

 private:
  static std::vector<std::uint8_t> encode(const Word& w, std::size_t from) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = from; i < w.size(); ++i) {
      out.push_back(static_cast<std::uint8_t>(w[i].generator * 2 + (w[i].inverted ? 1 : 0)));
    }
    return out;
  }
  static Word decode(const std::vector<std::uint8_t>& s) {
    std::vector<Letter> out;
    for (auto c : s) out.push_back({static_cast<std::uint32_t>(c >> 1), (c & 1) != 0});
    return Word(std::move(out));
  }
  static bool ends_with(const std::vector<std::uint8_t>& y, const std::vector<std::uint8_t>& s) {
    return y.size() >= s.size() && std::equal(s.rbegin(), s.rend(), y.rbegin());
  }

  // Visits every y = x b with b reduced, 1 <= |b| <= depth.
  void walk(const Word& x, std::vector<std::uint8_t>& y, std::size_t depth, int last,
            SeparationResult& result) {
    for (int c = 0; c < static_cast<int>(alphabet_size_); ++c) {
      if (last >= 0 && c == (last ^ 1)) continue;
      const bool cancels = !y.empty() && y.back() == (c ^ 1);
      std::uint8_t popped = 0;
      if (cancels) {
        popped = y.back();
        y.pop_back();
      } else {
        y.push_back(static_cast<std::uint8_t>(c));
      }
      if (y.size() <= n_ && (ends_with(y, sigma_[0]) || ends_with(y, sigma_[1]))) {
        ++result.violations;
        if (!result.witness) result.witness = std::make_pair(x, decode(y));
      }
      if (depth > 1) walk(x, y, depth - 1, c, result);
      if (cancels) {
        y.push_back(popped);
      } else {
        y.pop_back();
      }
    }
  }

  // Reduced words of length m whose last letter avoids one given letter.
  std::uint64_t tails(std::size_t m) const {
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < m; ++i) {
      if (out > UINT64_MAX / alphabet_size_) return UINT64_MAX;
      out *= alphabet_size_ - 1;
    }
    return out;
  }

  std::uint64_t count_members() const {
    auto add = [](std::uint64_t a, std::uint64_t b) { return a > UINT64_MAX - b ? UINT64_MAX : a + b; };
    std::uint64_t total = 0;
    if (k_ == 0) {
      // D is everything: |Ball(n)|.
      total = 1;
      for (std::size_t len = 1; len <= n_; ++len) {
        const std::uint64_t sphere = tails(len - 1);
        total = add(total, sphere == UINT64_MAX ? UINT64_MAX : sphere * alphabet_size_);
      }
      return total;
    }
    const int families = sigma_[0] == sigma_[1] ? 1 : 2;
    for (int f = 0; f < families; ++f) {
      for (std::size_t len = k_; len <= n_; ++len) total = add(total, tails(len - k_));
    }
    return total;
  }

  const GroupBackend& g_;
  std::size_t r_;
  std::size_t n_;
  std::size_t alphabet_size_;
  std::size_t k_ = 0;
  std::vector<std::uint8_t> sigma_[2];
};

}  // namespace detail

// Checks that the members of D_{z,r} inside Ball(n) are pairwise at distance
// >= r. n = SIZE_MAX checks the whole group (tree backends only).
inline SeparationResult check_d_separation(const Word& z, std::size_t r, std::size_t n, const GroupBackend& g) {
  if (g.is_tree()) return detail::TreeSeparation(z, r, n, g).run();
  if (n == SIZE_MAX) fail(ErrorKind::unsupported_backend, "global separation check needs a tree backend");
  SeparationResult result;
  result.radius = n;
  std::unordered_set<Word, WordHash> members;
  std::vector<Word> ordered;
  for_each_in_ball(n, g, [&](const Word& x) {
    if (detail::in_D(x, z, r, g)) {
      members.insert(x);
      ordered.push_back(x);
    }
    return true;
  });
  result.members = ordered.size();
  const auto shifts = detail::nontrivial_ball(r > 0 ? r - 1 : 0, g);
  for (const Word& x : ordered) {
    for (const Word& b : shifts) {
      Word y = multiply(x, b, g);
      if (y.size() > n || !members.contains(y)) continue;
      ++result.violations;
      if (!result.witness) result.witness = std::make_pair(x, std::move(y));
    }
  }
  return result;
}

inline PreparedTile prepare_tile_spec(const std::vector<Word>& F_raw, const SwingerSearch& search,
                                      const GroupBackend& g) {
  if (F_raw.empty()) fail(ErrorKind::malformed_input, "F must be nonempty");
  TileSpec spec;
  spec.input = detail::normalize_set(F_raw, g);
  if (spec.input.size() == 1) return TrivialTile{spec.input.front()};

  spec.translation = spec.input.front();
  const Word shift = inverse(spec.translation, g);
  for (const Word& f : spec.input) spec.F.push_back(multiply(shift, f, g));
  std::sort(spec.F.begin(), spec.F.end(), shortlex_less);
  for (const Word& f : spec.F) spec.M = std::max(spec.M, f.size());
  spec.r = 4 * spec.M + 1;
  spec.R = separation_constant(spec.r, g.delta());
  spec.v = spec.F[1];

  // Besides certification, z must lie outside F, give v^-1 z of infinite
  // order, and (tree backends) leave D_{z,r} r-separated in the whole group;
  // the last condition does not follow from the swinger property alone.
  const Word v_inv = inverse(spec.v, g);
  auto accept = [&](const Word& z) {
    if (std::find(spec.F.begin(), spec.F.end(), z) != spec.F.end()) return false;
    if (!detail::powers_grow(multiply(v_inv, z, g), g)) return false;
    return !g.is_tree() || check_d_separation(z, spec.r, SIZE_MAX, g).separated();
  };
  auto found = find_swinger(spec.r, spec.R, search, g, accept);
  if (!found) {
    fail(ErrorKind::search_budget, "no admissible " + std::to_string(spec.r) + "-swinger of length >= " +
                                       std::to_string(spec.R) + " found within budget " +
                                       std::to_string(search.budget));
  }
  spec.z = found->z;
  spec.certificate = found->certificate;
  spec.T = spec.F;
  spec.T.push_back(spec.z);
  return spec;
}

enum class Region { C, D };

// C: |x z^-1| < |x| + r.  D: |x z| < |x| + r or |x z^-1| < |x| + r.
inline bool region_membership(const Word& x, const TileSpec& spec, Region which, const GroupBackend& g) {
  const auto bound = x.size() + spec.r;
  const Word z_inv = inverse(spec.z, g);
  if (multiply(x, z_inv, g).size() < bound) return true;
  if (which == Region::C) return false;
  return multiply(x, spec.z, g).size() < bound;
}

struct CPair {
  Word representative;
  Word partner;  // representative * v^-1 z
  bool full_line = false;

  friend bool operator==(const CPair&, const CPair&) = default;
};

struct Pairing {
  std::vector<CPair> pairs;  // shortlex by representative
  std::size_t full_line_fallbacks = 0;
};

inline std::size_t back_bound(const TileSpec& spec) { return 4 * (spec.z.size() + spec.r); }

// The pair {s, s g}, g = v^-1 z, containing the C-member c: s sits at an even
// offset from the origin of c's <g>-orbit inside C (the first element of the
// forward ray). Orbits still inside C after back_bound backward steps take
// their parity from the shortlex-least element seen and are flagged.
inline CPair orbit_pair(const Word& c, const TileSpec& spec, const GroupBackend& g) {
  const Word step = multiply(inverse(spec.v, g), spec.z, g);
  const Word step_inv = inverse(step, g);
  if (!region_membership(c, spec, Region::C, g)) {
    fail(ErrorKind::precondition, format_word(c, g) + " is not in C");
  }
  if (!region_membership(multiply(c, step, g), spec, Region::C, g)) {
    fail(ErrorKind::consistency_violation, "C is not closed under v^-1 z at " + format_word(c, g));
  }
  std::vector<Word> walked{c};
  bool exited = false;
  for (std::size_t k = 0; k < back_bound(spec); ++k) {
    Word prev = multiply(walked.back(), step_inv, g);
    if (!region_membership(prev, spec, Region::C, g)) {
      exited = true;
      break;
    }
    walked.push_back(std::move(prev));
  }
  std::size_t offset;  // position of c counted from the parity anchor
  if (exited) {
    offset = walked.size() - 1;
  } else {
    auto it = std::min_element(walked.begin(), walked.end(), shortlex_less);
    offset = static_cast<std::size_t>(it - walked.begin());
  }
  CPair pair;
  pair.full_line = !exited;
  if (offset % 2 == 0) {
    pair.representative = c;
    pair.partner = multiply(c, step, g);
  } else {
    pair.representative = multiply(c, step_inv, g);
    pair.partner = c;
  }
  return pair;
}

// Pairs of C whose tile s v^-1 T can meet Ball(core_radius): every such s
// equals x t^-1 v for some x in the core ball and t in T. Pairs with both
// members outside the work ball are dropped.
inline Pairing pair_C(const TileSpec& spec, std::size_t core_radius, std::size_t work_radius,
                      const GroupBackend& g) {
  Pairing out;
  if (spec.trivial) return out;
  std::vector<Word> t_inv_v;
  for (const Word& t : spec.T) t_inv_v.push_back(multiply(inverse(t, g), spec.v, g));

  std::unordered_set<Word, WordHash> seen;
  std::unordered_map<Word, CPair, WordHash> by_rep;
  for (const Word& x : enumerate_ball(core_radius, g).elements) {
    for (const Word& shift : t_inv_v) {
      Word c = multiply(x, shift, g);
      if (!seen.insert(c).second || !region_membership(c, spec, Region::C, g)) continue;
      CPair pair = orbit_pair(c, spec, g);
      if (pair.representative.size() > work_radius && pair.partner.size() > work_radius) continue;
      const bool flagged = pair.full_line;
      if (by_rep.emplace(pair.representative, std::move(pair)).second && flagged) ++out.full_line_fallbacks;
    }
  }
  for (auto& [rep, pair] : by_rep) out.pairs.push_back(std::move(pair));
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const CPair& a, const CPair& b) { return shortlex_less(a.representative, b.representative); });
  return out;
}

enum class Stage { A, greedy };

struct Placement {
  Word anchor;
  Stage stage = Stage::greedy;
  std::size_t round = 0;

  friend bool operator==(const Placement&, const Placement&) = default;
};

inline std::vector<Word> tile_elements(const Word& anchor, const std::vector<Word>& T, const GroupBackend& g) {
  std::vector<Word> out;
  out.reserve(T.size());
  for (const Word& t : T) out.push_back(multiply(anchor, t, g));
  return out;
}

inline std::vector<Placement> build_A(const TileSpec& spec, const Pairing& pairing, const GroupBackend& g) {
  std::vector<Placement> out;
  const Word v_inv = inverse(spec.v, g);
  std::unordered_map<Word, std::size_t, WordHash> owner;
  for (const CPair& pair : pairing.pairs) {
    Placement p{multiply(pair.representative, v_inv, g), Stage::A, 0};
    for (const Word& e : tile_elements(p.anchor, spec.T, g)) {
      auto [it, inserted] = owner.emplace(e, out.size());
      if (!inserted) {
        fail(ErrorKind::consistency_violation,
             "A-stage tiles at " + format_word(out[it->second].anchor, g) + " and " +
                 format_word(p.anchor, g) + " overlap in " + format_word(e, g));
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Covers the rest of the core ball in shortlex order: an uncovered g gets the
// tile g z^-1 T, which contains g because z is in T.
inline std::vector<Placement> greedy_fill(const TileSpec& spec, const std::vector<Placement>& a_stage,
                                          std::size_t core_radius, std::size_t work_radius,
                                          const GroupBackend& g) {
  std::unordered_map<Word, bool, WordHash> covered;  // element -> placed in A stage
  for (const Placement& p : a_stage) {
    for (Word& e : tile_elements(p.anchor, spec.T, g)) covered.emplace(std::move(e), true);
  }
  const Word z_inv = inverse(spec.z, g);
  std::vector<Placement> out;
  std::size_t round = 0;
  std::size_t round_length = SIZE_MAX;
  for (const Word& x : enumerate_ball(core_radius, g).elements) {
    if (covered.contains(x)) continue;
    if (spec.trivial) {
      out.push_back({x, Stage::greedy, x.size()});
      covered.emplace(x, false);
      continue;
    }
    if (x.size() != round_length) {
      ++round;
      round_length = x.size();
    }
    Placement p{multiply(x, z_inv, g), Stage::greedy, round};
    if (p.anchor.size() > work_radius) {
      fail(ErrorKind::insufficient_work_radius,
           "anchor " + format_word(p.anchor, g) + " lies outside the work ball of radius " +
               std::to_string(work_radius));
    }
    for (Word& e : tile_elements(p.anchor, spec.T, g)) {
      if (auto it = covered.find(e); it != covered.end()) {
        fail(ErrorKind::consistency_violation,
             "greedy tile at " + format_word(p.anchor, g) + " meets an earlier " +
                 (it->second ? "A-stage" : "greedy") + " tile in " + format_word(e, g));
      }
      if (region_membership(e, spec, Region::C, g)) {
        fail(ErrorKind::consistency_violation,
             "greedy tile at " + format_word(p.anchor, g) + " meets C in " + format_word(e, g));
      }
      covered.emplace(std::move(e), false);
    }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regions and verification

struct VerificationReport {
  bool disjoint = true;
  bool core_covered = true;
  bool claim_c = true;
  bool claim_a = true;
  bool claim_new = true;
  bool d_separated = true;
  std::size_t core_size = 0;
  std::size_t uncovered = 0;
  std::size_t doubly_covered = 0;
  std::uint64_t d_members = 0;
  std::size_t d_violations = 0;
  std::size_t d_radius = 0;
  Json counterexample;  // null when every check holds

  bool all_true() const {
    return disjoint && core_covered && claim_c && claim_a && claim_new && d_separated;
  }
};

struct TilingRegion {
  GroupBackend backend = GroupBackend::free_group(2);
  TileSpec spec;
  std::size_t core_radius = 0;
  std::size_t work_radius = 0;
  std::vector<Placement> placements;
  Pairing pairing;
  VerificationReport report;
};

inline VerificationReport verify_tiling(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  const TileSpec& spec = region.spec;
  VerificationReport rep;
  Json witnesses = Json::object();
  auto note = [&](const char* check, Json w) {
    if (!witnesses.contains(check)) witnesses[check] = std::move(w);
  };

  if (spec.T.empty()) fail(ErrorKind::malformed_input, "tile is empty");

  // Tile elements, owners and per-stage bookkeeping.
  std::unordered_map<Word, std::size_t, WordHash> owner;
  for (std::size_t idx = 0; idx < region.placements.size(); ++idx) {
    const Placement& p = region.placements[idx];
    std::unordered_set<Word, WordHash> local;
    for (const Word& t : spec.T) {
      Word e = multiply(p.anchor, t, g);
      if (!local.insert(e).second) {
        rep.disjoint = false;
        note("disjoint", {{"element", format_word(e, g)}, {"placements", {idx}}});
        continue;
      }
      auto [it, inserted] = owner.emplace(e, idx);
      if (inserted) continue;
      const Placement& other = region.placements[it->second];
      rep.disjoint = false;
      Json w = {{"element", format_word(e, g)}, {"placements", {it->second, idx}}};
      note("disjoint", w);
      if (p.stage == Stage::A && other.stage == Stage::A) {
        rep.claim_a = false;
        note("claim_a", w);
      } else {
        rep.claim_new = false;
        note("claim_new", w);
      }
    }
  }

  for_each_in_ball(region.core_radius, g, [&](const Word& x) {
    ++rep.core_size;
    if (!owner.contains(x)) {
      ++rep.uncovered;
      rep.core_covered = false;
      note("core_covered", {{"element", format_word(x, g)}});
    }
    return true;
  });

  if (!spec.trivial) {
    const Word step = multiply(inverse(spec.v, g), spec.z, g);
    for (std::size_t idx = 0; idx < region.placements.size(); ++idx) {
      const Placement& p = region.placements[idx];
      if (p.stage == Stage::A) {
        const Word s = multiply(p.anchor, spec.v, g);
        const Word partner = multiply(s, step, g);
        if (!region_membership(s, spec, Region::C, g) || !region_membership(partner, spec, Region::C, g)) {
          rep.claim_c = false;
          note("claim_c", {{"representative", format_word(s, g)}, {"placement", idx}});
        }
      } else {
        for (const Word& t : spec.T) {
          const Word e = multiply(p.anchor, t, g);
          if (region_membership(e, spec, Region::C, g)) {
            rep.claim_new = false;
            note("claim_new", {{"element", format_word(e, g)}, {"placement", idx}, {"in", "C"}});
          }
        }
      }
    }
    for_each_in_ball(region.core_radius, g, [&](const Word& x) {
      if (region_membership(x, spec, Region::C, g) &&
          !region_membership(multiply(x, step, g), spec, Region::C, g)) {
        rep.claim_c = false;
        note("claim_c", {{"element", format_word(x, g)}});
      }
      return true;
    });

    const std::size_t n = std::min(region.work_radius, spec.z.size() + spec.r + 2);
    const SeparationResult sep = check_d_separation(spec.z, spec.r, n, g);
    rep.d_radius = n;
    rep.d_members = sep.members;
    rep.d_violations = sep.violations;
    if (sep.violations > 0) {
      rep.d_separated = false;
      note("d_separated", {{"x", format_word(sep.witness->first, g)},
                           {"y", format_word(sep.witness->second, g)}});
    }
  }

  // Doubly covered core elements (only meaningful when tiles overlap).
  if (!rep.disjoint) {
    std::unordered_map<Word, std::size_t, WordHash> hits;
    for (const Placement& p : region.placements) {
      for (const Word& t : spec.T) {
        Word e = multiply(p.anchor, t, g);
        if (e.size() <= region.core_radius) ++hits[e];
      }
    }
    for (const auto& [e, count] : hits) rep.doubly_covered += count > 1 ? 1 : 0;
  }

  rep.counterexample = witnesses.empty() ? Json(nullptr) : witnesses;
  return rep;
}

struct TilingOptions {
  SwingerSearch search;
  std::optional<std::size_t> work_radius;
  bool allow_empirical = false;
  bool raw_output = false;
};

inline std::size_t default_work_radius(const TileSpec& spec, std::size_t core_radius) {
  return core_radius + spec.z.size() + spec.M + 2;
}

inline TilingRegion build_tiling_from_spec(const TileSpec& spec, std::size_t core_radius,
                                           const TilingOptions& options, const GroupBackend& g) {
  TilingRegion region;
  region.backend = g;
  region.spec = spec;
  region.core_radius = core_radius;
  region.work_radius = options.work_radius.value_or(default_work_radius(spec, core_radius));
  if (!spec.trivial && region.work_radius < core_radius + spec.z.size() + spec.M) {
    fail(ErrorKind::insufficient_work_radius,
         "work radius must be at least core_radius + |z| + M = " +
             std::to_string(core_radius + spec.z.size() + spec.M));
  }
  region.pairing = pair_C(spec, core_radius, region.work_radius, g);
  region.placements = build_A(spec, region.pairing, g);
  auto greedy = greedy_fill(spec, region.placements, core_radius, region.work_radius, g);
  region.placements.insert(region.placements.end(), std::make_move_iterator(greedy.begin()),
                           std::make_move_iterator(greedy.end()));
  region.report = verify_tiling(region);
  if (!options.raw_output && !region.report.all_true()) {
    fail(ErrorKind::consistency_violation,
         "constructed region failed verification: " + region.report.counterexample.dump());
  }
  return region;
}

inline TilingRegion build_tiling(const std::vector<Word>& F_raw, std::size_t core_radius,
                                 const TilingOptions& options, const GroupBackend& g) {
  if (!g.is_tree() && !options.allow_empirical) {
    fail(ErrorKind::unsupported_backend,
         "exact swinger certification needs a tree backend; enable empirical mode for " +
             std::string(to_string(g.kind())));
  }
  PreparedTile prepared = prepare_tile_spec(F_raw, options.search, g);
  if (auto* trivial = std::get_if<TrivialTile>(&prepared)) {
    return build_tiling_from_spec(detail::trivial_spec({trivial->element}, g), core_radius, options, g);
  }
  return build_tiling_from_spec(std::get<TileSpec>(prepared), core_radius, options, g);
}

// Placements whose tiles meet Ball(core_radius), as shortlex-sorted strings.
inline std::vector<std::string> core_meeting_placements(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  std::vector<std::string> out;
  for (const Placement& p : region.placements) {
    bool meets = false;
    for (const Word& t : region.spec.T) meets = meets || multiply(p.anchor, t, g).size() <= region.core_radius;
    if (meets) out.push_back(std::string(p.stage == Stage::A ? "A:" : "greedy:") + format_word(p.anchor, g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json report_to_json(const VerificationReport& r) {
  return Json{{"disjoint", r.disjoint},
              {"core_covered", r.core_covered},
              {"claim_c", r.claim_c},
              {"claim_a", r.claim_a},
              {"claim_new", r.claim_new},
              {"d_separated", r.d_separated},
              {"core_size", r.core_size},
              {"uncovered", r.uncovered},
              {"doubly_covered", r.doubly_covered},
              {"d_radius", r.d_radius},
              {"d_members", r.d_members},
              {"d_violations", r.d_violations},
              {"counterexample", r.counterexample}};
}

// The stored report is informational; verification always recomputes it.
inline VerificationReport report_from_json(const Json& j) {
  VerificationReport r;
  r.disjoint = j.at("disjoint").get<bool>();
  r.core_covered = j.at("core_covered").get<bool>();
  r.claim_c = j.at("claim_c").get<bool>();
  r.claim_a = j.at("claim_a").get<bool>();
  r.claim_new = j.at("claim_new").get<bool>();
  r.d_separated = j.at("d_separated").get<bool>();
  r.core_size = j.at("core_size").get<std::size_t>();
  r.uncovered = j.at("uncovered").get<std::size_t>();
  r.doubly_covered = j.at("doubly_covered").get<std::size_t>();
  r.d_radius = j.at("d_radius").get<std::size_t>();
  r.d_members = j.at("d_members").get<std::uint64_t>();
  r.d_violations = j.at("d_violations").get<std::size_t>();
  r.counterexample = j.value("counterexample", Json(nullptr));
  return r;
}

inline Json region_to_json(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  const TileSpec& s = region.spec;
  auto words = [&](const std::vector<Word>& ws) {
    Json a = Json::array();
    for (const Word& w : ws) a.push_back(format_word(w, g));
    return a;
  };
  Json j;
  j["backend"] = backend_to_json(g);
  j["trivial"] = s.trivial;
  j["F_input"] = words(s.input);
  j["translation"] = format_word(s.translation, g);
  j["F"] = words(s.F);
  j["v"] = s.trivial ? Json(nullptr) : Json(format_word(s.v, g));
  j["z"] = s.trivial ? Json(nullptr) : Json(format_word(s.z, g));
  j["M"] = s.M;
  j["r"] = s.r;
  j["R"] = s.R;
  j["certificate"] = s.certificate ? certificate_to_json(*s.certificate, g) : Json(nullptr);
  j["core_radius"] = region.core_radius;
  j["work_radius"] = region.work_radius;
  Json placements = Json::array();
  for (const Placement& p : region.placements) {
    placements.push_back({{"anchor", format_word(p.anchor, g)},
                          {"stage", p.stage == Stage::A ? "A" : "greedy"},
                          {"round", p.round}});
  }
  j["placements"] = std::move(placements);
  Json reps = Json::array();
  for (const CPair& p : region.pairing.pairs) reps.push_back(format_word(p.representative, g));
  j["pairing"] = {{"representatives", std::move(reps)},
                  {"full_line_fallbacks", region.pairing.full_line_fallbacks}};
  j["report"] = report_to_json(region.report);
  return j;
}

inline TilingRegion region_from_json(const Json& j) {
  try {
    TilingRegion region;
    region.backend = backend_from_json(j.at("backend"));
    const GroupBackend& g = region.backend;
    auto words = [&](const Json& a) {
      std::vector<Word> out;
      for (const Json& w : a) out.push_back(parse_word(w.get<std::string>(), g));
      return out;
    };
    TileSpec& s = region.spec;
    s.trivial = j.value("trivial", false);
    s.input = j.contains("F_input") ? words(j.at("F_input")) : std::vector<Word>{};
    s.translation = j.contains("translation") ? parse_word(j.at("translation").get<std::string>(), g) : Word{};
    s.F = words(j.at("F"));
    if (s.F.empty()) fail(ErrorKind::malformed_input, "F must be nonempty");
    s.M = j.at("M").get<std::size_t>();
    s.r = j.at("r").get<std::size_t>();
    s.R = j.at("R").get<std::size_t>();
    s.T = s.F;
    if (!s.trivial) {
      s.v = parse_word(j.at("v").get<std::string>(), g);
      s.z = parse_word(j.at("z").get<std::string>(), g);
      s.T.push_back(s.z);
      if (!j.at("certificate").is_null()) s.certificate = certificate_from_json(j.at("certificate"), g);
    }
    region.core_radius = j.at("core_radius").get<std::size_t>();
    region.work_radius = j.at("work_radius").get<std::size_t>();
    for (const Json& p : j.at("placements")) {
      const std::string stage = p.at("stage").get<std::string>();
      if (stage != "A" && stage != "greedy") fail(ErrorKind::malformed_input, "unknown stage '" + stage + "'");
      region.placements.push_back({parse_word(p.at("anchor").get<std::string>(), g),
                                   stage == "A" ? Stage::A : Stage::greedy,
                                   p.value("round", std::size_t{0})});
    }
    if (j.contains("pairing")) {
      const Json& pj = j.at("pairing");
      const Word step = s.trivial ? Word{} : multiply(inverse(s.v, g), s.z, g);
      for (const Json& rep : pj.at("representatives")) {
        Word w = parse_word(rep.get<std::string>(), g);
        region.pairing.pairs.push_back({w, multiply(w, step, g), false});
      }
      region.pairing.full_line_fallbacks = pj.value("full_line_fallbacks", std::size_t{0});
    }
    if (j.contains("report") && !j.at("report").is_null()) region.report = report_from_json(j.at("report"));
    return region;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_input, std::string("bad tiling document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Export of the core-ball Cayley graph, one color class per placement.

namespace detail {

struct CoreGraph {
  std::vector<Word> vertices;
  std::vector<long> tile;  // placement index, -1 if uncovered
  std::vector<std::tuple<std::size_t, std::size_t, Letter>> edges;
};

inline CoreGraph core_graph(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  CoreGraph cg;
  cg.vertices = enumerate_ball(region.core_radius, g).elements;
  std::unordered_map<Word, std::size_t, WordHash> index;
  for (std::size_t i = 0; i < cg.vertices.size(); ++i) index.emplace(cg.vertices[i], i);
  cg.tile.assign(cg.vertices.size(), -1);
  for (std::size_t p = 0; p < region.placements.size(); ++p) {
    for (const Word& t : region.spec.T) {
      if (auto it = index.find(multiply(region.placements[p].anchor, t, g)); it != index.end()) {
        cg.tile[it->second] = static_cast<long>(p);
      }
    }
  }
  for (std::size_t i = 0; i < cg.vertices.size(); ++i) {
    for (const Letter& x : g.alphabet()) {
      if (x.inverted) continue;
      auto it = index.find(multiply(cg.vertices[i], Word{x}, g));
      if (it == index.end()) continue;
      // Undirected; self-inverse generators would otherwise appear twice.
      if (g.self_inverse(x.generator) && it->second < i) continue;
      cg.edges.emplace_back(i, it->second, x);
    }
  }
  return cg;
}

inline std::string color_of(long tile) {
  if (tile < 0) return "#ffffff";
  const auto h = static_cast<std::uint32_t>(tile) * 2654435761U;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", 64 + (h >> 24) % 192, 64 + (h >> 16) % 192,
                64 + (h >> 8) % 192);
  return buf;
}

}  // namespace detail

inline std::string export_dot(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  const auto cg = detail::core_graph(region);
  std::string out = "graph cayley {\n  node [style=filled];\n";
  for (std::size_t i = 0; i < cg.vertices.size(); ++i) {
    out += "  v" + std::to_string(i) + " [label=\"" + format_word(cg.vertices[i], g) + "\", tile=" +
           std::to_string(cg.tile[i]) + ", fillcolor=\"" + detail::color_of(cg.tile[i]) + "\"];\n";
  }
  for (const auto& [a, b, x] : cg.edges) {
    out += "  v" + std::to_string(a) + " -- v" + std::to_string(b) + " [label=\"" +
           format_word(Word{x}, g) + "\"];\n";
  }
  out += "}\n";
  return out;
}

inline std::string export_graphml(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  const auto cg = detail::core_graph(region);
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "  <key id=\"tile\" for=\"node\" attr.name=\"tile\" attr.type=\"long\"/>\n"
      "  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n"
      "  <key id=\"generator\" for=\"edge\" attr.name=\"generator\" attr.type=\"string\"/>\n"
      "  <graph id=\"cayley\" edgedefault=\"undirected\">\n";
  for (std::size_t i = 0; i < cg.vertices.size(); ++i) {
    out += "    <node id=\"v" + std::to_string(i) + "\"><data key=\"label\">" +
           format_word(cg.vertices[i], g) + "</data><data key=\"tile\">" + std::to_string(cg.tile[i]) +
           "</data><data key=\"color\">" + detail::color_of(cg.tile[i]) + "</data></node>\n";
  }
  std::size_t e = 0;
  for (const auto& [a, b, x] : cg.edges) {
    out += "    <edge id=\"e" + std::to_string(e++) + "\" source=\"v" + std::to_string(a) + "\" target=\"v" +
           std::to_string(b) + "\"><data key=\"generator\">" + format_word(Word{x}, g) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace monotile
