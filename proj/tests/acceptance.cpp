// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "monotile/monotile.hpp"
#include "support.hpp"

using namespace monotile;
using testing_support::free_inverse;
using testing_support::free_reduce;
using testing_support::str;
using testing_support::word;

namespace {

const GroupBackend F2 = GroupBackend::free_group(2);

struct Criterion {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "failed: " << what << "; ";
    ok = ok && cond;
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %d (%s) [%.1fs] %s\n", c.ok ? "PASS" : "FAIL", id, name.c_str(), secs,
              c.detail.str().c_str());
  std::fflush(stdout);
  if (!c.ok) ++failures;
}

std::vector<Word> words(std::initializer_list<const char*> names) {
  std::vector<Word> out;
  for (const char* n : names) out.push_back(word(n, F2));
  return out;
}

const TilingRegion& pipeline_region() {
  static const TilingRegion region = build_tiling(words({"", "a"}), 8, {}, F2);
  return region;
}

// Checks the pair form and the three claims directly from the placements.
void check_claims(const TilingRegion& region, Criterion& c, const std::string& tag) {
  const TileSpec& s = region.spec;
  const Word step = multiply(inverse(s.v, F2), s.z, F2);
  for (const CPair& pair : region.pairing.pairs) {
    c.require(pair.partner == multiply(pair.representative, step, F2), tag + " pair form");
    c.require(region_membership(pair.representative, s, Region::C, F2) &&
                  region_membership(pair.partner, s, Region::C, F2),
              tag + " pair members in C");
  }
  std::set<std::string> a_cells, greedy_cells;
  for (const Placement& p : region.placements) {
    for (const Word& t : s.T) {
      const std::string e = str(multiply(p.anchor, t, F2), F2);
      if (p.stage == Stage::A) {
        c.require(a_cells.insert(e).second, tag + " A tiles disjoint at " + e);
      } else {
        c.require(!a_cells.contains(e), tag + " greedy tile meets A at " + e);
        c.require(greedy_cells.insert(e).second, tag + " greedy tiles disjoint at " + e);
      }
    }
  }
  const VerificationReport& rep = region.report;
  c.require(rep.claim_c && rep.claim_a && rep.claim_new && rep.disjoint && rep.core_covered, tag + " report");
  c.require(oracle::independent_partition_check(region).ok, tag + " independent partition");
}

struct Captured {
  int code = -1;
  std::string out;
};

Captured run_cli(const std::string& args) {
  Captured r;
  const std::string cmd = std::string(MONOTILE_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

int main() {
  report(1, "end-to-end tiling of Ball(8) for F = {1, a}", [](Criterion& c) {
    const TilingRegion& region = pipeline_region();
    const TileSpec& s = region.spec;
    c.require(s.r == 5 && s.R == 10, "constants r = 5, R = 10");
    c.require(s.z.size() >= 10, "|z| >= 10");
    c.require(s.certificate && s.certificate->verdict == Verdict::certified && s.certificate->r == 5,
              "certified 5-swinger");
    const VerificationReport rep = verify_tiling(region);
    c.require(rep.all_true() && rep.uncovered == 0 && rep.doubly_covered == 0, "verify_tiling exact");
    const oracle::PartitionCheck check = oracle::independent_partition_check(region);
    c.require(check.ok && check.uncovered == 0 && check.doubly_covered == 0, "independent check exact");
    c.detail << "z=" << str(s.z, F2) << " core=" << check.ball_size << " placements=" << region.placements.size();
  });

  report(2, "D is r-separated for the chosen z", [](Criterion& c) {
    const TileSpec& s = pipeline_region().spec;
    const std::size_t r = s.r;
    const SeparationResult full = check_d_separation(s.z, r, s.z.size() + 7, F2);
    c.require(full.violations == 0, "no violations within Ball(|z| + 7)");
    // Direct listing of D at a radius small enough to enumerate.
    const std::string z = str(s.z, F2);
    const std::size_t n = 11;
    std::set<std::string> D;
    for_each_in_ball(n, F2, [&](const Word& w) {
      const std::string x = str(w, F2);
      if (free_reduce(x + z).size() < x.size() + r || free_reduce(x + free_inverse(z)).size() < x.size() + r) {
        D.insert(x);
      }
      return true;
    });
    std::size_t close = 0;
    for (const Word& b : enumerate_ball(r - 1, F2).elements) {
      if (b.empty()) continue;
      const std::string bs = str(b, F2);
      for (const std::string& x : D) close += D.contains(free_reduce(x + bs));
    }
    c.require(close == 0, "direct listing at radius 11");
    c.require(check_d_separation(s.z, r, n, F2).members == D.size(), "member counts agree at radius 11");
    c.detail << "members(|z|+7)=" << full.members << " direct(11)=" << D.size();
  });

  report(3, "tree certification agrees with brute-force margins", [](Criterion& c) {
    std::mt19937_64 rng(2024);
    int certified = 0, refuted = 0;
    for (int trial = 0; trial < 150; ++trial) {
      const Word z = word(testing_support::random_reduced(rng, 1 + rng() % 12), F2);
      const std::size_t r = 1 + rng() % 3;
      const SwingerCertificate cert = certify_swinger_tree(z, r, F2);
      const oracle::MarginTable table = oracle::brute_margin_table(z, r, 50, F2);
      const std::string tag = str(z, F2) + " r=" + std::to_string(r);
      if (cert.verdict == Verdict::certified) {
        ++certified;
        c.require(table.min_margin() > 0, tag + " certified with nonpositive margin");
      } else if (cert.verdict == Verdict::refuted && cert.witness) {
        ++refuted;
        const MarginWitness& w = *cert.witness;
        c.require(w.margin <= 0, tag + " positive witness");
        c.require(swinger_margin(z, w.b, w.i, w.j, w.m, F2) == w.margin, tag + " witness recomputes");
        if (w.m <= 50) {
          const auto it = table.entries.find({format_word(w.b, F2), w.i, w.j, w.m});
          c.require(it != table.entries.end() && it->second == w.margin, tag + " witness in table");
        }
      } else {
        c.require(false, tag + " no verdict");
      }
    }
    c.detail << "certified=" << certified << " refuted=" << refuted;
  });

  report(4, "no swingers in the integers", [](Criterion& c) {
    const GroupBackend Z = GroupBackend::integers();
    for (int n = -20; n <= 20; ++n) {
      if (n == 0) continue;
      const SwingerCertificate cert = check_swinger_bounded(parse_word(std::to_string(n), Z), 1, 1, Z);
      c.require(cert.verdict == Verdict::refuted && cert.witness && cert.witness->m == 1,
                "refuted at m = 1 for " + std::to_string(n));
    }
    for (std::size_t budget : {1u, 100u, 10000u, 1000000u}) {
      SwingerSearch opts;
      opts.budget = budget;
      c.require(!find_swinger(1, 1, opts, Z), "enumerate budget " + std::to_string(budget));
      opts.strategy = SearchStrategy::random;
      c.require(!find_swinger(1, 1, opts, Z), "random budget " + std::to_string(budget));
    }
  });

  report(5, "two-element pairs and disjointness claims, cores 4-8", [](Criterion& c) {
    std::size_t regions = 0, pairs = 0;
    for (const char* name : {"1,a", "1,b,ab", "1,a,aa"}) {
      std::vector<Word> F;
      std::stringstream ss(name);
      for (std::string item; std::getline(ss, item, ',');) F.push_back(parse_word(item, F2));
      const TileSpec spec = std::get<TileSpec>(prepare_tile_spec(F, SwingerSearch{}, F2));
      for (std::size_t core = 4; core <= 8; ++core) {
        const TilingRegion region = build_tiling_from_spec(spec, core, {}, F2);
        check_claims(region, c, std::string("{") + name + "} core " + std::to_string(core));
        ++regions;
        pairs += region.pairing.pairs.size();
      }
    }
    c.detail << "regions=" << regions << " pairs=" << pairs;
  });

  report(6, "boundary relations on trees", [](Criterion& c) {
    std::mt19937_64 rng(55);
    const auto random_word = [&](std::size_t lo, std::size_t hi) {
      return word(testing_support::random_reduced(rng, lo + rng() % (hi - lo + 1)), F2);
    };
    std::size_t equal = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const Word x = random_word(1, 8);
      const Word y = trial % 5 == 0 ? power(x, 1 + static_cast<int>(rng() % 3), F2) : random_word(1, 8);
      const FixRelation rel = fix_relation(x, y, F2);
      c.require(rel == FixRelation::equal || rel == FixRelation::disjoint, "relation kind");
      equal += rel == FixRelation::equal;
    }
    std::size_t finite = 0, skipped = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Word h = random_word(0, 6);
      const Word g = random_word(1, 6);
      if (apply_boundary(h, lox_endpoint(g, Sign::plus, F2), F2) == lox_endpoint(g, Sign::minus, F2)) {
        ++skipped;
        continue;
      }
      const auto n = lox_product_threshold(h, g, 64, F2);
      c.require(n.has_value(), "threshold finite");
      finite += n.has_value();
    }
    c.detail << "equal=" << equal << " thresholds=" << finite << " precondition_failed=" << skipped;
  });

  report(7, "finite-group exact cover", [](Criterion& c) {
    const oracle::FiniteGroupTable z6 = oracle::cyclic(6);
    const auto yes = oracle::exact_cover_search(z6, {0, 1});
    c.require(yes && yes->translates == std::vector<std::uint32_t>{0, 2, 4}, "{0,1} via {0,2,4}");
    c.require(!oracle::exact_cover_search(z6, {0, 1, 3}), "{0,1,3} does not tile");
    // Hand check: the translate covering 0 leaves a complement that is never a translate.
    bool hand_tiles = false;
    for (int s = 0; s < 6; ++s) {
      std::set<int> first{s % 6, (s + 1) % 6, (s + 3) % 6};
      if (!first.contains(0)) continue;
      std::set<int> rest;
      for (int e = 0; e < 6; ++e) {
        if (!first.contains(e)) rest.insert(e);
      }
      for (int u = 0; u < 6; ++u) hand_tiles = hand_tiles || rest == std::set<int>{u % 6, (u + 1) % 6, (u + 3) % 6};
    }
    c.require(!hand_tiles, "hand check agrees");
    std::size_t solved = 0;
    for (std::uint32_t n = 1; n <= 24; ++n) {
      for (std::uint32_t k = 1; k <= n; ++k) {
        if (n % k != 0) continue;
        std::vector<std::uint32_t> T(k);
        for (std::uint32_t i = 0; i < k; ++i) T[i] = i;
        const auto sol = oracle::exact_cover_search(oracle::cyclic(n), T);
        c.require(sol && sol->translates.size() == n / k, "interval " + std::to_string(k) + " in Z/" + std::to_string(n));
        solved += sol.has_value();
      }
    }
    c.detail << "intervals=" << solved;
  });

  report(8, "placements meeting the core are stable under larger work radius", [](Criterion& c) {
    const TilingRegion& base = pipeline_region();
    const auto expected = core_meeting_placements(base);
    c.require(!expected.empty(), "nonempty");
    for (std::size_t extra = 1; extra <= 3; ++extra) {
      TilingOptions opts;
      opts.work_radius = base.work_radius + extra;
      const TilingRegion bigger = build_tiling_from_spec(base.spec, base.core_radius, opts, F2);
      c.require(core_meeting_placements(bigger) == expected, "work radius +" + std::to_string(extra));
    }
    c.detail << "placements=" << expected.size() << " work_radius=" << base.work_radius;
  });

  report(9, "CLI outputs are byte-identical across runs", [](Criterion& c) {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / ("monotile_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::string tile_file = (dir / "tile.json").string();
    const Captured made = run_cli("tile --group free:2 --set 1,a --core-radius 6 --seed 1 --out " + tile_file);
    c.require(made.code == 0, "tile --out");
    const std::vector<std::string> commands = {
        "ball --group free:2 -r 3 --seed 1",
        "ball --group fpc:2,3 -r 5 --seed 1",
        "swinger find --group free:2 -r 5 --seed 1",
        "swinger find --group free:2 -r 3 --strategy random --seed 9 --budget 20000",
        "swinger check --group free:2 -r 1 --z abAB --seed 1",
        "swinger check --group free:2 -r 1 --z a --seed 1",
        "tile --group free:2 --set 1,a --core-radius 6 --seed 1",
        "tile --group free:2 --set 1,b,ab --core-radius 4 --seed 1 --format graphml",
        "verify " + tile_file,
        "oracle cover --group cyclic:6 --set 0,1 --seed 1",
        "oracle cover --group cyclic:6 --set 0,1,3 --seed 1",
        "oracle extend --group S4 --set 0,1,2 --seed 1",
        "export dot " + tile_file,
        "export graphml " + tile_file,
    };
    for (const std::string& cmd : commands) {
      const Captured first = run_cli(cmd);
      c.require(!first.out.empty(), "output for " + cmd);
      for (int k = 0; k < 2; ++k) {
        const Captured again = run_cli(cmd);
        c.require(again.code == first.code && again.out == first.out, "identical output for " + cmd);
      }
    }
    std::filesystem::remove_all(dir);
    c.detail << "commands=" << commands.size();
  });

  return failures == 0 ? 0 : 1;
}
