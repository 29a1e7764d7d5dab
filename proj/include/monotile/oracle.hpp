#pragma once

// Reference checks that share no traversal or reduction code with the
// construction: exact cover search in finite groups, brute-force margin
// tables, and an independent partition check of a tiling region.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "monotile/group.hpp"
#include "monotile/tiler.hpp"

namespace monotile::oracle {

// Multiplication table on {0, ..., n-1}, identity 0, table[a][b] = a * b.
struct FiniteGroupTable {
  std::vector<std::vector<std::uint32_t>> table;
  std::vector<std::uint32_t> generators;  // optional; used when turned into a backend

  std::size_t order() const { return table.size(); }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return table[a][b]; }
  std::uint32_t inv(std::uint32_t a) const {
    for (std::uint32_t b = 0; b < order(); ++b) {
      if (table[a][b] == 0) return b;
    }
    fail(ErrorKind::malformed_input, "element without inverse");
  }

  void validate() const {
    const std::size_t n = order();
    if (n == 0) fail(ErrorKind::malformed_input, "empty group table");
    for (std::size_t a = 0; a < n; ++a) {
      if (table[a].size() != n) fail(ErrorKind::malformed_input, "group table is not square");
      std::vector<bool> row(n), col(n);
      for (std::size_t b = 0; b < n; ++b) {
        if (table[a][b] >= n || table[b].size() != n || table[b][a] >= n) {
          fail(ErrorKind::malformed_input, "group table entry out of range");
        }
        row[table[a][b]] = true;
        col[table[b][a]] = true;
      }
      if (std::find(row.begin(), row.end(), false) != row.end() ||
          std::find(col.begin(), col.end(), false) != col.end()) {
        fail(ErrorKind::malformed_input, "group table is not a Latin square");
      }
      if (table[0][a] != a || table[a][0] != a) fail(ErrorKind::malformed_input, "0 is not the identity");
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          if (table[table[a][b]][c] != table[a][table[b][c]]) {
            fail(ErrorKind::malformed_input, "group table is not associative");
          }
        }
      }
    }
  }

  GroupBackend to_backend() const { return GroupBackend::finite(table, generators); }

  FiniteGroupTable transposed() const {
    FiniteGroupTable t;
    t.table = table;
    for (std::size_t a = 0; a < order(); ++a) {
      for (std::size_t b = 0; b < order(); ++b) t.table[a][b] = table[b][a];
    }
    t.generators = generators;
    return t;
  }
};

namespace detail {

inline FiniteGroupTable from_permutations(const std::vector<std::vector<std::uint32_t>>& perms,
                                          std::vector<std::uint32_t> generators) {
  std::map<std::vector<std::uint32_t>, std::uint32_t> index;
  for (std::uint32_t i = 0; i < perms.size(); ++i) index[perms[i]] = i;
  FiniteGroupTable t;
  t.table.assign(perms.size(), std::vector<std::uint32_t>(perms.size()));
  for (std::size_t a = 0; a < perms.size(); ++a) {
    for (std::size_t b = 0; b < perms.size(); ++b) {
      // (a * b)(x) = a(b(x))
      std::vector<std::uint32_t> c(perms[a].size());
      for (std::size_t x = 0; x < c.size(); ++x) c[x] = perms[a][perms[b][x]];
      t.table[a][b] = index.at(c);
    }
  }
  t.generators = std::move(generators);
  return t;
}

inline FiniteGroupTable symmetric(std::uint32_t k) {
  std::vector<std::uint32_t> p(k);
  for (std::uint32_t i = 0; i < k; ++i) p[i] = i;
  std::vector<std::vector<std::uint32_t>> perms;
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  // Generators: the transposition (0 1) and the k-cycle.
  std::vector<std::uint32_t> swap01(k), cycle(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    swap01[i] = i;
    cycle[i] = (i + 1) % k;
  }
  std::swap(swap01[0], swap01[1]);
  const auto pos = [&](const std::vector<std::uint32_t>& q) {
    return static_cast<std::uint32_t>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  return from_permutations(perms, {pos(swap01), pos(cycle)});
}

}  // namespace detail

inline FiniteGroupTable cyclic(std::uint32_t n) {
  if (n == 0) fail(ErrorKind::malformed_input, "cyclic group order must be positive");
  FiniteGroupTable t;
  t.table.assign(n, std::vector<std::uint32_t>(n));
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) t.table[a][b] = (a + b) % n;
  }
  if (n > 1) t.generators = {1};
  return t;
}

// Elements r^k (index k) and r^k s (index n + k); order 2n.
inline FiniteGroupTable dihedral(std::uint32_t n) {
  if (n < 1) fail(ErrorKind::malformed_input, "dihedral parameter must be positive");
  FiniteGroupTable t;
  const std::uint32_t N = 2 * n;
  t.table.assign(N, std::vector<std::uint32_t>(N));
  for (std::uint32_t a = 0; a < N; ++a) {
    for (std::uint32_t b = 0; b < N; ++b) {
      const std::uint32_t ka = a % n, kb = b % n;
      const bool sa = a >= n, sb = b >= n;
      // r^ka s^sa r^kb s^sb = r^(ka +- kb) s^(sa xor sb)
      const std::uint32_t k = sa ? (ka + n - kb) % n : (ka + kb) % n;
      t.table[a][b] = k + ((sa != sb) ? n : 0);
    }
  }
  t.generators = n > 1 ? std::vector<std::uint32_t>{1, n} : std::vector<std::uint32_t>{n};
  return t;
}

inline FiniteGroupTable symmetric3() { return detail::symmetric(3); }
inline FiniteGroupTable symmetric4() { return detail::symmetric(4); }

inline FiniteGroupTable table_from_json(const Json& j) {
  FiniteGroupTable t;
  try {
    t.table = j.at("table").get<std::vector<std::vector<std::uint32_t>>>();
    if (j.contains("order") && j.at("order").get<std::size_t>() != t.table.size()) {
      fail(ErrorKind::malformed_input, "order does not match the table");
    }
    if (j.contains("generators")) t.generators = j.at("generators").get<std::vector<std::uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_input, std::string("bad group table: ") + e.what());
  }
  t.validate();
  for (auto x : t.generators) {
    if (x >= t.order()) fail(ErrorKind::malformed_input, "generator out of range");
  }
  return t;
}

inline Json table_to_json(const FiniteGroupTable& t) {
  return Json{{"order", t.order()}, {"table", t.table}, {"generators", t.generators}};
}

// ---------------------------------------------------------------------------
// Exact cover by left translates

struct CoverSolution {
  std::vector<std::uint32_t> translates;  // sorted; the lexicographically least solution
  std::size_t solutions = 0;
  std::size_t nodes = 0;
};

inline constexpr std::size_t kDefaultNodeCap = 10'000'000;

namespace detail {

class CoverSearch {
 public:
  CoverSearch(const FiniteGroupTable& grp, const std::vector<std::uint32_t>& tile, std::size_t cap)
      : n_(grp.order()), cap_(cap), covered_(n_, false) {
    cells_.assign(n_, {});
    for (std::uint32_t t = 0; t < n_; ++t) {
      for (auto tau : tile) cells_[t].push_back(grp.mul(t, tau));
    }
    covering_.assign(n_, {});
    for (std::uint32_t t = 0; t < n_; ++t) {
      for (auto e : cells_[t]) covering_[e].push_back(t);
    }
    for (auto& c : covering_) std::sort(c.begin(), c.end());
  }

  CoverSolution run() {
    search();
    CoverSolution out;
    out.solutions = solutions_;
    out.nodes = nodes_;
    if (best_) out.translates = *best_;
    return out;
  }

 private:
  bool fits(std::uint32_t t) const {
    for (auto e : cells_[t]) {
      if (covered_[e]) return false;
    }
    return true;
  }

  void search() {
    if (++nodes_ > cap_) {
      fail(ErrorKind::search_budget, "exact cover search exceeded " + std::to_string(cap_) + " nodes");
    }
    // Most constrained uncovered element.
    std::optional<std::uint32_t> pick;
    std::size_t fewest = SIZE_MAX;
    for (std::uint32_t e = 0; e < n_; ++e) {
      if (covered_[e]) continue;
      std::size_t count = 0;
      for (auto t : covering_[e]) count += fits(t) ? 1 : 0;
      if (count < fewest) {
        fewest = count;
        pick = e;
      }
      if (count == 0) return;
    }
    if (!pick) {
      ++solutions_;
      auto sol = chosen_;
      std::sort(sol.begin(), sol.end());
      if (!best_ || sol < *best_) best_ = std::move(sol);
      return;
    }
    for (auto t : covering_[*pick]) {
      if (!fits(t)) continue;
      for (auto e : cells_[t]) covered_[e] = true;
      chosen_.push_back(t);
      search();
      chosen_.pop_back();
      for (auto e : cells_[t]) covered_[e] = false;
    }
  }

  std::size_t n_;
  std::size_t cap_;
  std::vector<std::vector<std::uint32_t>> cells_;
  std::vector<std::vector<std::uint32_t>> covering_;
  std::vector<bool> covered_;
  std::vector<std::uint32_t> chosen_;
  std::optional<std::vector<std::uint32_t>> best_;
  std::size_t nodes_ = 0;
  std::size_t solutions_ = 0;
};

inline std::vector<std::uint32_t> checked_subset(const FiniteGroupTable& grp, std::vector<std::uint32_t> s) {
  if (s.empty()) fail(ErrorKind::malformed_input, "subset must be nonempty");
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    fail(ErrorKind::malformed_input, "subset has repeated elements");
  }
  if (s.back() >= grp.order()) fail(ErrorKind::malformed_input, "subset element out of range");
  return s;
}

}  // namespace detail

// Some S with the left translates {s T : s in S} partitioning the group.
inline std::optional<CoverSolution> exact_cover_search(const FiniteGroupTable& grp,
                                                       const std::vector<std::uint32_t>& T,
                                                       std::size_t node_cap = kDefaultNodeCap) {
  const auto tile = detail::checked_subset(grp, T);
  if (grp.order() % tile.size() != 0) return std::nullopt;
  CoverSolution sol = detail::CoverSearch(grp, tile, node_cap).run();
  if (sol.solutions == 0) return std::nullopt;
  return sol;
}

struct Extension {
  std::vector<std::uint32_t> tile;
  CoverSolution cover;
};

// Smallest superset of F (ties broken lexicographically) that tiles by left
// translates. Only sizes dividing the group order are tried.
inline Extension monotile_extend_finite(const FiniteGroupTable& grp, const std::vector<std::uint32_t>& F,
                                        std::size_t node_cap = kDefaultNodeCap) {
  const auto base = detail::checked_subset(grp, F);
  std::vector<std::uint32_t> rest;
  for (std::uint32_t e = 0; e < grp.order(); ++e) {
    if (!std::binary_search(base.begin(), base.end(), e)) rest.push_back(e);
  }
  for (std::size_t size = base.size(); size <= grp.order(); ++size) {
    if (grp.order() % size != 0) continue;
    const std::size_t extra = size - base.size();
    // Combinations of `rest` in lexicographic order.
    std::vector<std::size_t> idx(extra);
    for (std::size_t i = 0; i < extra; ++i) idx[i] = i;
    while (true) {
      std::vector<std::uint32_t> cand = base;
      for (auto i : idx) cand.push_back(rest[i]);
      std::sort(cand.begin(), cand.end());
      if (auto cover = exact_cover_search(grp, cand, node_cap)) return {cand, *cover};
      std::size_t i = extra;
      while (i > 0 && idx[i - 1] == rest.size() - extra + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t k = i; k < extra; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  // The whole group always tiles; unreachable for a valid table.
  fail(ErrorKind::consistency_violation, "no tiling superset found");
}

// Tilings by right translates {T s}: left translates in the transposed table.
// G = sum of s T iff G = sum of T^-1 s^-1, so this search on T^-1 must agree
// with exact_cover_search on T.
inline std::optional<CoverSolution> right_cover_search(const FiniteGroupTable& grp,
                                                       const std::vector<std::uint32_t>& T,
                                                       std::size_t node_cap = kDefaultNodeCap) {
  const FiniteGroupTable op = grp.transposed();
  return exact_cover_search(op, T, node_cap);
}

inline std::vector<std::uint32_t> inverse_set(const FiniteGroupTable& grp, const std::vector<std::uint32_t>& T) {
  std::vector<std::uint32_t> out;
  for (auto t : T) out.push_back(grp.inv(t));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Naive words: letter strings reduced by repeated scanning.

namespace naive {

using Letters = std::vector<std::pair<std::uint32_t, bool>>;

inline Letters letters_of(const Word& w) {
  Letters out;
  for (const Letter& x : w.letters()) out.emplace_back(x.generator, x.inverted);
  return out;
}

inline Word word_of(const Letters& s) {
  std::vector<Letter> out;
  for (auto [gen, inv] : s) out.push_back({gen, inv});
  return Word(std::move(out));
}

// Free reduction for free groups and the integers; other backends go through
// their own normal form.
inline Letters reduce(Letters s, const GroupBackend& g) {
  if (!g.is_tree()) return letters_of(monotile::reduce(word_of(s), g));
  std::size_t i = 0;
  while (i + 1 < s.size()) {
    if (s[i].first == s[i + 1].first && s[i].second != s[i + 1].second) {
      s.erase(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      if (i > 0) --i;
    } else {
      ++i;
    }
  }
  return s;
}

inline Letters product(const Letters& a, const Letters& b, const GroupBackend& g) {
  Letters s = a;
  s.insert(s.end(), b.begin(), b.end());
  return reduce(std::move(s), g);
}

inline Letters invert(const Letters& a) {
  Letters out(a.rbegin(), a.rend());
  for (auto& x : out) x.second = !x.second;
  return out;
}

inline std::vector<std::pair<std::uint32_t, bool>> alphabet(const GroupBackend& g) {
  std::vector<std::pair<std::uint32_t, bool>> out;
  for (std::uint32_t k = 0; k < g.generator_count(); ++k) {
    out.emplace_back(k, false);
    if (!g.self_inverse(k)) out.emplace_back(k, true);
  }
  return out;
}

// Breadth-first ball: every reduced product of at most `radius` generators.
inline std::set<Letters> ball(std::size_t radius, const GroupBackend& g) {
  std::set<Letters> all{Letters{}};
  std::set<Letters> frontier{Letters{}};
  for (std::size_t n = 1; n <= radius; ++n) {
    std::set<Letters> next;
    for (const Letters& w : frontier) {
      for (auto x : alphabet(g)) {
        Letters y = product(w, Letters{x}, g);
        if (y.size() == n && !all.contains(y)) next.insert(y);
      }
    }
    all.insert(next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

}  // namespace naive

// Margins |z^{im} b z^{jm}| - |z^m| for all 1 <= |b| <= r, sign pairs and
// 1 <= m <= m_max. Keys: (b, i, j, m) with b formatted.
struct MarginTable {
  std::map<std::tuple<std::string, int, int, std::size_t>, std::int64_t> entries;

  std::int64_t min_margin() const {
    std::int64_t best = INT64_MAX;
    for (const auto& [k, v] : entries) best = std::min(best, v);
    return best;
  }
};

inline MarginTable brute_margin_table(const Word& z, std::size_t r, std::size_t m_max, const GroupBackend& g) {
  MarginTable table;
  const naive::Letters zl = naive::reduce(naive::letters_of(z), g);
  std::vector<naive::Letters> pos{naive::Letters{}}, neg{naive::Letters{}};
  for (std::size_t m = 1; m <= m_max; ++m) {
    pos.push_back(naive::product(pos.back(), zl, g));
    neg.push_back(naive::invert(pos.back()));
  }
  for (const naive::Letters& b : naive::ball(r, g)) {
    if (b.empty()) continue;
    const std::string name = format_word(naive::word_of(b), g);
    for (int i : {1, -1}) {
      for (int j : {1, -1}) {
        for (std::size_t m = 1; m <= m_max; ++m) {
          const auto& left = i > 0 ? pos[m] : neg[m];
          const auto& right = j > 0 ? pos[m] : neg[m];
          const auto len = naive::product(naive::product(left, b, g), right, g).size();
          table.entries[{name, i, j, m}] =
              static_cast<std::int64_t>(len) - static_cast<std::int64_t>(pos[m].size());
        }
      }
    }
  }
  return table;
}

struct PartitionCheck {
  bool ok = true;
  std::size_t ball_size = 0;
  std::size_t uncovered = 0;
  std::size_t doubly_covered = 0;
  std::optional<Word> witness;
  std::string reason;
};

// Every element of Ball(core_radius) lies in exactly one placed tile.
inline PartitionCheck independent_partition_check(const TilingRegion& region) {
  const GroupBackend& g = region.backend;
  PartitionCheck out;
  const std::set<naive::Letters> ball = naive::ball(region.core_radius, g);
  out.ball_size = ball.size();
  std::map<naive::Letters, std::size_t> hits;
  for (const Placement& p : region.placements) {
    const naive::Letters anchor = naive::letters_of(p.anchor);
    for (const Word& t : region.spec.T) {
      naive::Letters e = naive::product(anchor, naive::letters_of(t), g);
      if (ball.contains(e)) ++hits[e];
    }
  }
  for (const naive::Letters& x : ball) {
    auto it = hits.find(x);
    const std::size_t count = it == hits.end() ? 0 : it->second;
    if (count == 1) continue;
    out.ok = false;
    if (count == 0) ++out.uncovered;
    else ++out.doubly_covered;
    if (!out.witness) {
      out.witness = naive::word_of(x);
      out.reason = count == 0 ? "uncovered" : "covered " + std::to_string(count) + " times";
    }
  }
  return out;
}

}  // namespace monotile::oracle
