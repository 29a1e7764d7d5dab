#include <gtest/gtest.h>

#include <random>
#include <set>

#include "monotile/oracle.hpp"
#include "support.hpp"

using namespace monotile;
using namespace monotile::oracle;
using testing_support::word;

namespace {

const GroupBackend F2 = GroupBackend::free_group(2);

using Set = std::vector<std::uint32_t>;

// Does {s T : s in S} partition the group? Checked by counting.
bool partitions(const FiniteGroupTable& grp, const Set& T, const Set& S) {
  std::vector<int> count(grp.order(), 0);
  for (auto s : S) {
    for (auto t : T) ++count[grp.mul(s, t)];
  }
  return std::all_of(count.begin(), count.end(), [](int c) { return c == 1; });
}

// Exhaustive search over all 2^n translate sets; only for small groups.
bool tiles_by_enumeration(const FiniteGroupTable& grp, const Set& T) {
  const std::size_t n = grp.order();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) * T.size() != n) continue;
    Set S;
    for (std::uint32_t e = 0; e < n; ++e) {
      if (mask >> e & 1) S.push_back(e);
    }
    if (partitions(grp, T, S)) return true;
  }
  return false;
}

Set random_subset(std::mt19937_64& rng, std::size_t n) {
  Set out;
  for (std::uint32_t e = 0; e < n; ++e) {
    if (rng() % 3 == 0) out.push_back(e);
  }
  if (out.empty()) out.push_back(static_cast<std::uint32_t>(rng() % n));
  return out;
}

}  // namespace

TEST(Tables, BuiltinsAreGroups) {
  for (const auto& t : {cyclic(1), cyclic(6), cyclic(13), dihedral(3), dihedral(4), dihedral(6), symmetric3(),
                        symmetric4()}) {
    EXPECT_NO_THROW(t.validate());
    EXPECT_NO_THROW(t.to_backend());
    EXPECT_NO_THROW(t.transposed().validate());
  }
  EXPECT_EQ(symmetric3().order(), 6u);
  EXPECT_EQ(symmetric4().order(), 24u);
  EXPECT_EQ(dihedral(5).order(), 10u);
}

TEST(Tables, GeneratorsGenerate) {
  for (const auto& t : {cyclic(9), dihedral(5), symmetric3(), symmetric4()}) {
    std::set<std::uint32_t> reached{0};
    std::vector<std::uint32_t> frontier{0};
    while (!frontier.empty()) {
      std::vector<std::uint32_t> next;
      for (auto e : frontier) {
        for (auto s : t.generators) {
          if (reached.insert(t.mul(e, s)).second) next.push_back(t.mul(e, s));
        }
      }
      frontier = std::move(next);
    }
    EXPECT_EQ(reached.size(), t.order());
  }
}

TEST(Tables, JsonRoundTripAndValidation) {
  const FiniteGroupTable d = dihedral(4);
  const FiniteGroupTable back = table_from_json(table_to_json(d));
  EXPECT_EQ(back.table, d.table);
  EXPECT_EQ(back.generators, d.generators);
  EXPECT_THROW(table_from_json(Json::parse(R"({"order": 2, "table": [[0,1],[1,1]]})")), Error);
  EXPECT_THROW(table_from_json(Json::parse(R"({"order": 3, "table": [[0,1],[1,0]]})")), Error);
  // Latin square that is not associative.
  const Json quasi = Json::parse(
      R"({"table": [[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]})");
  EXPECT_THROW(table_from_json(quasi), Error);
}

TEST(ExactCover, CyclicSixExamples) {
  const FiniteGroupTable z6 = cyclic(6);
  const auto two = exact_cover_search(z6, {0, 1});
  ASSERT_TRUE(two);
  EXPECT_EQ(two->translates, (Set{0, 2, 4}));
  EXPECT_TRUE(partitions(z6, {0, 1}, two->translates));

  EXPECT_FALSE(exact_cover_search(z6, {0, 1, 3}));
  EXPECT_FALSE(exact_cover_search(z6, {0, 1, 2, 3}));

  const auto id = exact_cover_search(z6, {0});
  ASSERT_TRUE(id);
  EXPECT_EQ(id->translates, (Set{0, 1, 2, 3, 4, 5}));
}

// Independent hand check of {0, 1, 3} in Z/6: a tiling needs two translates,
// one of them covering 0; each candidate leaves a complement that is not a
// translate.
TEST(ExactCover, CyclicSixHandCheck) {
  const Set T{0, 1, 3};
  int tried = 0;
  for (int s = 0; s < 6; ++s) {
    std::set<int> first;
    for (int t : T) first.insert((s + t) % 6);
    if (!first.contains(0)) continue;
    ++tried;
    std::set<int> complement;
    for (int e = 0; e < 6; ++e) {
      if (!first.contains(e)) complement.insert(e);
    }
    for (int u = 0; u < 6; ++u) {
      std::set<int> second;
      for (int t : T) second.insert((u + t) % 6);
      EXPECT_NE(second, complement) << "s=" << s << " u=" << u;
    }
  }
  EXPECT_EQ(tried, 3);
  EXPECT_TRUE(tiles_by_enumeration(cyclic(6), {0, 1}));
  EXPECT_FALSE(tiles_by_enumeration(cyclic(6), {0, 1, 3}));
}

TEST(ExactCover, IntervalsInCyclicGroups) {
  for (std::uint32_t n = 1; n <= 24; ++n) {
    const FiniteGroupTable zn = cyclic(n);
    for (std::uint32_t k = 1; k <= n; ++k) {
      if (n % k != 0) continue;
      Set T(k);
      for (std::uint32_t i = 0; i < k; ++i) T[i] = i;
      const auto sol = exact_cover_search(zn, T);
      ASSERT_TRUE(sol) << n << " " << k;
      Set expected;
      for (std::uint32_t s = 0; s < n; s += k) expected.push_back(s);
      EXPECT_EQ(sol->translates, expected) << n << " " << k;
      EXPECT_EQ(sol->solutions, k);
    }
  }
}

TEST(ExactCover, AgreesWithEnumeration) {
  std::mt19937_64 rng(10);
  for (const auto& grp : {cyclic(8), cyclic(9), dihedral(3), dihedral(4), dihedral(5), symmetric3(), cyclic(12)}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Set T = random_subset(rng, grp.order());
      const auto sol = exact_cover_search(grp, T);
      EXPECT_EQ(sol.has_value(), tiles_by_enumeration(grp, T));
      if (sol) EXPECT_TRUE(partitions(grp, T, sol->translates));
    }
  }
}

TEST(ExactCover, LeftRightDuality) {
  std::mt19937_64 rng(20);
  for (const auto& grp : {symmetric3(), dihedral(4), dihedral(6), symmetric4()}) {
    for (int trial = 0; trial < 40; ++trial) {
      Set T = random_subset(rng, grp.order());
      const auto left = exact_cover_search(grp, T);
      const auto right = right_cover_search(grp, inverse_set(grp, T));
      EXPECT_EQ(left.has_value(), right.has_value());
      if (right) {
        // T^-1 s partitions G, so s^-1 T does too.
        std::vector<int> count(grp.order(), 0);
        for (auto s : right->translates) {
          for (auto t : T) ++count[grp.mul(grp.inv(s), t)];
        }
        EXPECT_TRUE(std::all_of(count.begin(), count.end(), [](int c) { return c == 1; }));
      }
    }
  }
}

TEST(ExactCover, Errors) {
  EXPECT_THROW(exact_cover_search(cyclic(4), {}), Error);
  EXPECT_THROW(exact_cover_search(cyclic(4), {0, 0}), Error);
  EXPECT_THROW(exact_cover_search(cyclic(4), {7}), Error);
  try {
    exact_cover_search(cyclic(24), {0}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::search_budget);
  }
}

TEST(Extend, Examples) {
  const Extension z4 = monotile_extend_finite(cyclic(4), {0, 1});
  EXPECT_EQ(z4.tile, (Set{0, 1}));
  EXPECT_EQ(z4.cover.translates, (Set{0, 2}));

  const FiniteGroupTable s3 = symmetric3();
  const Extension all = monotile_extend_finite(s3, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(all.tile, (Set{0, 1, 2, 3, 4, 5}));

  // {0, 1, 3} fails and no other 3-set contains it, so the answer is Z/6.
  const Extension z6 = monotile_extend_finite(cyclic(6), {0, 1, 3});
  EXPECT_EQ(z6.tile, (Set{0, 1, 2, 3, 4, 5}));
}

TEST(Extend, MinimalAndContainsF) {
  std::mt19937_64 rng(30);
  for (const auto& grp : {cyclic(8), dihedral(4), cyclic(12)}) {
    for (int trial = 0; trial < 15; ++trial) {
      const Set F = random_subset(rng, grp.order());
      const Extension ext = monotile_extend_finite(grp, F);
      EXPECT_TRUE(std::includes(ext.tile.begin(), ext.tile.end(), F.begin(), F.end()));
      EXPECT_TRUE(partitions(grp, ext.tile, ext.cover.translates));
      // No smaller superset tiles.
      const std::size_t n = grp.order();
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (size >= ext.tile.size()) continue;
        Set cand;
        for (std::uint32_t e = 0; e < n; ++e) {
          if (mask >> e & 1) cand.push_back(e);
        }
        if (!std::includes(cand.begin(), cand.end(), F.begin(), F.end())) continue;
        EXPECT_FALSE(tiles_by_enumeration(grp, cand));
      }
    }
  }
}

TEST(MarginTable, Examples) {
  const MarginTable t = brute_margin_table(word("abAB", F2), 1, 3, F2);
  // |z^m a z^m| = 9, 17, 25 against |z^m| = 4, 8, 12.
  EXPECT_EQ(t.entries.at({"a", 1, 1, 1}), 5);
  EXPECT_EQ(t.entries.at({"a", 1, 1, 2}), 9);
  EXPECT_EQ(t.entries.at({"a", 1, 1, 3}), 13);
  EXPECT_EQ(t.entries.size(), 4u * 4u * 3u);

  const MarginTable a = brute_margin_table(word("a", F2), 1, 3, F2);
  EXPECT_EQ(a.entries.at({"a", 1, -1, 1}), 0);
  EXPECT_EQ(a.entries.at({"a", 1, -1, 2}), -1);
  EXPECT_EQ(a.entries.at({"a", 1, -1, 3}), -2);
}

TEST(MarginTable, AgreesWithLibraryMargins) {
  std::mt19937_64 rng(40);
  int checked = 0;
  while (checked < 1000) {
    const Word z = word(testing_support::random_reduced(rng, 1 + rng() % 6), F2);
    const std::size_t r = 1 + rng() % 2;
    const MarginTable t = brute_margin_table(z, r, 5, F2);
    for (const auto& [key, value] : t.entries) {
      if (rng() % 8 != 0) continue;
      const auto& [b, i, j, m] = key;
      EXPECT_EQ(swinger_margin(z, word(b, F2), i, j, m, F2), value);
      ++checked;
    }
  }
}

TEST(MarginTable, NaiveBallMatchesLibraryBall) {
  for (const GroupBackend& g : {F2, GroupBackend::free_group(3), GroupBackend::integers()}) {
    const auto naive_ball = naive::ball(4, g);
    EXPECT_EQ(naive_ball.size(), enumerate_ball(4, g).elements.size());
    for (const Word& w : enumerate_ball(4, g).elements) EXPECT_TRUE(naive_ball.contains(naive::letters_of(w)));
  }
}

TEST(PartitionCheck, AgreesWithVerifierUnderCorruption) {
  const TileSpec spec = std::get<TileSpec>(prepare_tile_spec({Word{}, word("a", F2)}, SwingerSearch{}, F2));
  const TilingRegion region = build_tiling_from_spec(spec, 4, {}, F2);
  ASSERT_TRUE(independent_partition_check(region).ok);

  std::mt19937_64 rng(50);
  const auto ball = enumerate_ball(5, F2).elements;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    TilingRegion bad = region;
    auto& ps = bad.placements;
    const std::size_t k = rng() % ps.size();
    switch (rng() % 3) {
      case 0: ps.erase(ps.begin() + static_cast<std::ptrdiff_t>(k)); break;
      case 1: ps.push_back(ps[k]); break;
      default: ps[k].anchor = ball[rng() % ball.size()]; break;
    }
    const VerificationReport rep = verify_tiling(bad);
    const PartitionCheck check = independent_partition_check(bad);
    EXPECT_EQ(check.ok, rep.core_covered && rep.doubly_covered == 0) << trial;
    EXPECT_EQ(check.uncovered, rep.uncovered) << trial;
    EXPECT_EQ(check.doubly_covered, rep.doubly_covered) << trial;
    failures += check.ok ? 0 : 1;
  }
  EXPECT_GT(failures, 10);
}

TEST(PartitionCheck, WitnessIsFirstProblemElement) {
  const TileSpec spec = std::get<TileSpec>(prepare_tile_spec({Word{}, word("a", F2)}, SwingerSearch{}, F2));
  TilingRegion region = build_tiling_from_spec(spec, 3, {}, F2);
  region.placements.push_back(region.placements.back());
  const PartitionCheck dup = independent_partition_check(region);
  ASSERT_FALSE(dup.ok);
  ASSERT_TRUE(dup.witness);
  EXPECT_NE(dup.reason.find("covered 2 times"), std::string::npos);
}
