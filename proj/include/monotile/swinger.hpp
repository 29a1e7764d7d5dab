#pragma once

// r-swingers: loxodromic z with |z^{im} b z^{jm}| > |z^m| for all i, j in
// {1, -1}, m >= 1 and 1 <= |b| <= r.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "monotile/boundary.hpp"
#include "monotile/group.hpp"

namespace monotile {

enum class Verdict { certified, refuted, inconclusive_positive, inconclusive };
enum class CertMode { exact_tree, bounded_empirical };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive_positive: return "inconclusive-positive";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

inline std::string_view to_string(CertMode m) {
  return m == CertMode::exact_tree ? "exact_tree" : "bounded_empirical";
}

// Scan order of the sign pairs (i, j).
inline constexpr std::array<std::pair<int, int>, 4> kSignPairs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

struct MarginWitness {
  Word b;
  int i = 1;
  int j = 1;
  std::size_t m = 1;
  std::int64_t margin = 0;

  friend bool operator==(const MarginWitness&, const MarginWitness&) = default;
};

// Per (b, i, j): from m0 on the lengths |z^{im} b z^{jm}| grew by `increment`
// three times in a row, and `margin` is the margin at m0.
struct Stabilization {
  Word b;
  int i = 1;
  int j = 1;
  std::size_t m0 = 1;
  std::int64_t increment = 0;
  std::int64_t margin = 0;

  friend bool operator==(const Stabilization&, const Stabilization&) = default;
};

struct SwingerCertificate {
  Word z;
  std::size_t r = 0;
  Verdict verdict = Verdict::inconclusive;
  CertMode mode = CertMode::bounded_empirical;
  std::optional<MarginWitness> witness;
  std::vector<Stabilization> stabilization;
  std::size_t checked_up_to = 0;

  friend bool operator==(const SwingerCertificate&, const SwingerCertificate&) = default;
};

namespace detail {

inline void check_swinger_inputs(const Word& z, const GroupBackend& g) {
  if (z.empty()) fail(ErrorKind::degenerate_element, "z must be nontrivial");
  if (!has_infinite_order(z, g)) {
    fail(ErrorKind::not_loxodromic, "z = " + format_word(z, g) + " has finite order");
  }
}

inline std::vector<Word> nontrivial_ball(std::size_t r, const GroupBackend& g) {
  std::vector<Word> out;
  for_each_in_ball(r, g, [&](const Word& b) {
    if (!b.empty()) out.push_back(b);
    return true;
  });
  return out;
}

inline std::size_t length_of_triple(const Word& left, const Word& b, const Word& right,
                                    const GroupBackend& g) {
  return multiply(multiply(left, b, g), right, g).size();
}

}  // namespace detail

// |z^{im} b z^{jm}| - |z^m|.
inline std::int64_t swinger_margin(const Word& z, const Word& b, int i, int j, std::size_t m,
                                   const GroupBackend& g) {
  detail::check_swinger_inputs(z, g);
  if (b.empty()) fail(ErrorKind::degenerate_element, "b must be nontrivial");
  if (m == 0) fail(ErrorKind::malformed_input, "m must be at least 1");
  if ((i != 1 && i != -1) || (j != 1 && j != -1)) fail(ErrorKind::malformed_input, "i, j must be +-1");
  const Word zm = power(z, static_cast<std::int64_t>(m), g);
  const Word left = i > 0 ? zm : inverse(zm, g);
  const Word right = j > 0 ? zm : inverse(zm, g);
  return static_cast<std::int64_t>(detail::length_of_triple(left, b, right, g)) -
         static_cast<std::int64_t>(zm.size());
}

// Checks every margin for m <= m_max. Never certifies.
inline SwingerCertificate check_swinger_bounded(const Word& z, std::size_t r, std::size_t m_max,
                                                const GroupBackend& g) {
  if (r == 0) fail(ErrorKind::malformed_input, "r must be at least 1");
  if (m_max == 0) fail(ErrorKind::malformed_input, "m_max must be at least 1");
  detail::check_swinger_inputs(z, g);

  std::vector<Word> pos{Word{}}, neg{Word{}};
  for (std::size_t m = 1; m <= m_max; ++m) {
    pos.push_back(multiply(pos.back(), z, g));
    neg.push_back(inverse(pos.back(), g));
    if (pos[m].size() <= pos[m - 1].size()) {
      fail(ErrorKind::not_loxodromic, "powers of z stop growing at m = " + std::to_string(m));
    }
  }

  SwingerCertificate cert;
  cert.z = z;
  cert.r = r;
  cert.mode = CertMode::bounded_empirical;
  cert.checked_up_to = m_max;
  for (const Word& b : detail::nontrivial_ball(r, g)) {
    for (auto [i, j] : kSignPairs) {
      for (std::size_t m = 1; m <= m_max; ++m) {
        const Word& left = i > 0 ? pos[m] : neg[m];
        const Word& right = j > 0 ? pos[m] : neg[m];
        const auto margin = static_cast<std::int64_t>(detail::length_of_triple(left, b, right, g)) -
                            static_cast<std::int64_t>(pos[m].size());
        if (margin <= 0) {
          cert.verdict = Verdict::refuted;
          cert.witness = MarginWitness{b, i, j, m, margin};
          return cert;
        }
      }
    }
  }
  cert.verdict = Verdict::inconclusive_positive;
  return cert;
}

inline std::size_t certification_cap(const Word& z, std::size_t r) {
  return 8 * (r + z.size()) + 64;
}

// Exact certification on tree backends. In a tree |z^{im} b z^{jm}| is
// eventually affine in m with slope 2|core(z)|, except when b carries an
// endpoint of z onto the other one, where cancellation is unbounded and the
// margins eventually decrease. Three equal increments above |core(z)| with all
// margins positive so far imply positivity for every larger m.
inline SwingerCertificate certify_swinger_tree(const Word& z, std::size_t r, const GroupBackend& g) {
  require_tree(g, "certify_swinger_tree");
  if (r == 0) fail(ErrorKind::malformed_input, "r must be at least 1");
  detail::check_swinger_inputs(z, g);

  const auto core_length = static_cast<std::int64_t>(cyclic_decomposition(z, g).core.size());
  const std::size_t cap = certification_cap(z, r);
  const Word z_inv = inverse(z, g);

  std::vector<Word> pos{Word{}}, neg{Word{}};
  auto ensure_powers = [&](std::size_t m) {
    while (pos.size() <= m) {
      pos.push_back(multiply(pos.back(), z, g));
      neg.push_back(multiply(neg.back(), z_inv, g));
    }
  };

  SwingerCertificate cert;
  cert.z = z;
  cert.r = r;
  cert.mode = CertMode::exact_tree;
  std::size_t deepest = 0;

  for (const Word& b : detail::nontrivial_ball(r, g)) {
    for (auto [i, j] : kSignPairs) {
      std::vector<std::int64_t> lengths{0};
      std::optional<Stabilization> stable;
      for (std::size_t m = 1; m <= cap; ++m) {
        ensure_powers(m);
        const Word& left = i > 0 ? pos[m] : neg[m];
        const Word& right = j > 0 ? pos[m] : neg[m];
        const auto len = static_cast<std::int64_t>(detail::length_of_triple(left, b, right, g));
        const auto margin = len - static_cast<std::int64_t>(pos[m].size());
        lengths.push_back(len);
        deepest = std::max(deepest, m);
        if (margin <= 0) {
          cert.verdict = Verdict::refuted;
          cert.witness = MarginWitness{b, i, j, m, margin};
          cert.checked_up_to = deepest;
          cert.stabilization.clear();
          return cert;
        }
        if (m >= 4) {
          const std::int64_t d1 = lengths[m - 2] - lengths[m - 3];
          const std::int64_t d2 = lengths[m - 1] - lengths[m - 2];
          const std::int64_t d3 = lengths[m] - lengths[m - 1];
          if (d1 == d2 && d2 == d3 && d1 > core_length) {
            const std::size_t m0 = m - 3;
            stable = Stabilization{b, i, j, m0, d1,
                                   lengths[m0] - static_cast<std::int64_t>(pos[m0].size())};
            break;
          }
        }
      }
      if (!stable) {
        cert.verdict = Verdict::inconclusive;
        cert.checked_up_to = deepest;
        cert.stabilization.clear();
        return cert;
      }
      cert.stabilization.push_back(std::move(*stable));
    }
  }
  cert.verdict = Verdict::certified;
  cert.checked_up_to = deepest;
  return cert;
}

// Recomputes the certificate from scratch and compares.
inline bool reverify_certificate(const SwingerCertificate& cert, const GroupBackend& g) {
  if (cert.mode == CertMode::exact_tree) return certify_swinger_tree(cert.z, cert.r, g) == cert;
  return check_swinger_bounded(cert.z, cert.r, cert.checked_up_to, g) == cert;
}

// True when no nontrivial b with |b| <= r moves an endpoint of y into Fix(y).
inline bool boundary_precondition(const Word& y, std::size_t r, const GroupBackend& g) {
  require_tree(g, "boundary_precondition");
  if (y.empty()) fail(ErrorKind::degenerate_element, "y must be nontrivial");
  // y itself fixes both of its endpoints.
  if (y.size() <= r) return false;
  const FixSet fix = fix_set(y, g);
  bool ok = true;
  for_each_in_ball(r, g, [&](const Word& b) {
    if (b.empty()) return true;
    for (const PeriodicRay& p : fix.points) {
      if (fix_contains(fix, apply_boundary(b, p, g))) {
        ok = false;
        return false;
      }
    }
    return true;
  });
  return ok;
}

inline std::optional<std::size_t> swinger_power_threshold(const Word& y, std::size_t r,
                                                          std::size_t n_max, const GroupBackend& g) {
  require_tree(g, "swinger_power_threshold");
  if (y.empty()) fail(ErrorKind::degenerate_element, "y must be nontrivial");
  for (std::size_t n = 1; n <= n_max; ++n) {
    const Word z = power(y, static_cast<std::int64_t>(n), g);
    if (certify_swinger_tree(z, r, g).verdict == Verdict::certified) return n;
  }
  return std::nullopt;
}

// In a free group <z, z^b> is cyclic iff z and z^b commute; non-cyclic
// subgroups are free of rank >= 2. The common-power scan is a second check.
inline bool not_virtually_cyclic_check(const Word& z, const Word& b, std::size_t e_max,
                                       const GroupBackend& g) {
  require_tree(g, "not_virtually_cyclic_check");
  detail::check_swinger_inputs(z, g);
  if (b.empty()) fail(ErrorKind::degenerate_element, "b must be nontrivial");
  const Word conj = multiply(multiply(inverse(b, g), z, g), b, g);
  if (multiply(z, conj, g) == multiply(conj, z, g)) return false;
  std::vector<Word> z_powers, c_powers;
  for (std::size_t e = 1; e <= e_max; ++e) {
    z_powers.push_back(power(z, static_cast<std::int64_t>(e), g));
    c_powers.push_back(power(conj, static_cast<std::int64_t>(e), g));
  }
  for (const Word& zp : z_powers) {
    for (const Word& cp : c_powers) {
      if (zp == cp || zp == inverse(cp, g)) return false;
    }
  }
  return true;
}

enum class SearchStrategy { enumerate, random };

struct SwingerSearch {
  SearchStrategy strategy = SearchStrategy::enumerate;
  std::uint64_t seed = 0;
  std::size_t budget = 1'000'000;
  std::size_t bounded_m_max = 25;  // non-tree backends
};

struct SwingerFound {
  Word root;
  std::size_t exponent = 1;
  Word z;
  SwingerCertificate certificate;
};

namespace detail {

inline bool is_primitive_cyclic(const Word& y, const GroupBackend& g) {
  if (y.empty()) return false;
  if (y.size() > 1 && y.front() == g.invert(y.back())) return false;
  return primitive_root_length(y.letters()) == y.size();
}

using SwingerFilter = std::function<bool(const Word&)>;

// Tries y^n, n = 1, 2, ..., until a power of length >= min_length certifies
// (tree) or passes the bounded check (other backends), and passes `accept`.
inline std::optional<SwingerFound> try_powers(const Word& y, std::size_t r, std::size_t min_length,
                                              const SwingerSearch& opts, const GroupBackend& g,
                                              const SwingerFilter& accept) {
  std::size_t n = 1;
  Word z = y;
  while (z.size() < min_length) {
    z = multiply(z, y, g);
    ++n;
  }
  const std::size_t last = n + 4;
  for (; n <= last; ++n, z = multiply(z, y, g)) {
    SwingerCertificate cert = g.is_tree() ? certify_swinger_tree(z, r, g)
                                          : check_swinger_bounded(z, r, opts.bounded_m_max, g);
    if (cert.verdict != Verdict::certified && cert.verdict != Verdict::inconclusive_positive) continue;
    if (!accept || accept(z)) {
      return SwingerFound{y, n, z, std::move(cert)};
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Candidate search. Tree backends return certified swingers; other backends
// return candidates whose bounded check is inconclusive-positive. `budget`
// caps the number of candidate words drawn. `accept`, when set, must also hold
// for the returned z.
inline std::optional<SwingerFound> find_swinger(std::size_t r, std::size_t min_length,
                                                const SwingerSearch& opts, const GroupBackend& g,
                                                const detail::SwingerFilter& accept = {}) {
  if (opts.budget == 0) fail(ErrorKind::malformed_input, "search budget must be positive");
  if (r == 0) fail(ErrorKind::malformed_input, "r must be at least 1");
  if (g.kind() == BackendKind::finite) return std::nullopt;

  auto consider = [&](const Word& y) -> std::optional<SwingerFound> {
    if (g.is_tree()) {
      if (!detail::is_primitive_cyclic(y, g)) return std::nullopt;
      if (!boundary_precondition(y, r, g)) return std::nullopt;
    } else if (!has_infinite_order(y, g)) {
      return std::nullopt;
    }
    return detail::try_powers(y, r, min_length, opts, g, accept);
  };

  std::size_t drawn = 0;
  std::optional<SwingerFound> found;
  if (opts.strategy == SearchStrategy::enumerate) {
    for (std::size_t n = 1; drawn < opts.budget && !found; ++n) {
      // Z has exactly two primitive elements, both of length 1.
      if (g.kind() == BackendKind::integers && n > 1) break;
      bool any = false;
      for_each_in_sphere(n, g, [&](const Word& y) {
        any = true;
        ++drawn;
        found = consider(y);
        return !found && drawn < opts.budget;
      });
      if (!any) break;
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    const std::size_t max_len = std::max<std::size_t>(min_length, r + 2) + 2;
    const auto& alphabet = g.alphabet();
    while (drawn < opts.budget && !found) {
      ++drawn;
      const std::size_t len = 1 + static_cast<std::size_t>(rng() % max_len);
      Word y;
      while (y.size() < len) {
        const Letter x = alphabet[static_cast<std::size_t>(rng() % alphabet.size())];
        if (g.extends_normally(y, x)) y.raw().push_back(x);
      }
      found = consider(y);
    }
  }
  return found;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json certificate_to_json(const SwingerCertificate& c, const GroupBackend& g) {
  Json j;
  j["z"] = format_word(c.z, g);
  j["r"] = c.r;
  j["verdict"] = std::string(to_string(c.verdict));
  j["mode"] = std::string(to_string(c.mode));
  if (c.witness) {
    j["witness"] = {{"b", format_word(c.witness->b, g)},
                    {"i", c.witness->i},
                    {"j", c.witness->j},
                    {"m", c.witness->m},
                    {"margin", c.witness->margin}};
  } else {
    j["witness"] = nullptr;
  }
  j["checked_up_to"] = c.checked_up_to;
  Json stab = Json::array();
  for (const auto& s : c.stabilization) {
    stab.push_back({{"b", format_word(s.b, g)},
                    {"i", s.i},
                    {"j", s.j},
                    {"m0", s.m0},
                    {"increment", s.increment},
                    {"margin", s.margin}});
  }
  j["stabilization"] = std::move(stab);
  return j;
}

inline SwingerCertificate certificate_from_json(const Json& j, const GroupBackend& g) {
  try {
    SwingerCertificate c;
    c.z = parse_word(j.at("z").get<std::string>(), g);
    c.r = j.at("r").get<std::size_t>();
    const std::string verdict = j.at("verdict").get<std::string>();
    if (verdict == "certified") c.verdict = Verdict::certified;
    else if (verdict == "refuted") c.verdict = Verdict::refuted;
    else if (verdict == "inconclusive-positive") c.verdict = Verdict::inconclusive_positive;
    else if (verdict == "inconclusive") c.verdict = Verdict::inconclusive;
    else fail(ErrorKind::malformed_input, "unknown verdict '" + verdict + "'");
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "exact_tree") c.mode = CertMode::exact_tree;
    else if (mode == "bounded_empirical") c.mode = CertMode::bounded_empirical;
    else fail(ErrorKind::malformed_input, "unknown certification mode '" + mode + "'");
    if (j.contains("witness") && !j.at("witness").is_null()) {
      const Json& w = j.at("witness");
      c.witness = MarginWitness{parse_word(w.at("b").get<std::string>(), g), w.at("i").get<int>(),
                                w.at("j").get<int>(), w.at("m").get<std::size_t>(),
                                w.at("margin").get<std::int64_t>()};
    }
    c.checked_up_to = j.at("checked_up_to").get<std::size_t>();
    if (j.contains("stabilization")) {
      for (const Json& s : j.at("stabilization")) {
        c.stabilization.push_back({parse_word(s.at("b").get<std::string>(), g), s.at("i").get<int>(),
                                   s.at("j").get<int>(), s.at("m0").get<std::size_t>(),
                                   s.at("increment").get<std::int64_t>(),
                                   s.at("margin").get<std::int64_t>()});
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_input, std::string("bad certificate: ") + e.what());
  }
}

}  // namespace monotile
