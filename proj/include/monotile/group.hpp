#pragma once

// Group backends: normal-form arithmetic, the exact word metric and
// shortlex ball enumeration.
//
// Every backend stores elements as words over its letter alphabet, and every
// normal form is a geodesic, so word length is the letter count:
//   free(k)               reduced words over a, A, b, B, ...
//   free_product_cyclic   syllables g^e with e the representative of least
//                         absolute value in (-order/2, order/2], written as |e|
//                         copies of g (or of g^-1 when e < 0)
//   integers              a^n written as |n| copies of a or A
//   finite                shortlex-least word over the generating letters

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "monotile/error.hpp"

namespace monotile {

using Json = nlohmann::ordered_json;

struct Letter {
  std::uint32_t generator = 0;
  bool inverted = false;

  friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<Letter> letters) : letters_(letters) {}

  std::span<const Letter> letters() const noexcept { return letters_; }
  std::vector<Letter>& raw() noexcept { return letters_; }
  const std::vector<Letter>& raw() const noexcept { return letters_; }

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }
  const Letter& front() const { return letters_.front(); }
  const Letter& back() const { return letters_.back(); }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

// Length first, then lexicographic in alphabet declaration order
// (a < A < b < B < ...). This is the enumeration order of every ball.
inline bool shortlex_less(const Word& x, const Word& y) {
  if (x.size() != y.size()) return x.size() < y.size();
  return std::lexicographical_compare(x.letters().begin(), x.letters().end(),
                                      y.letters().begin(), y.letters().end());
}

struct ShortlexLess {
  bool operator()(const Word& x, const Word& y) const { return shortlex_less(x, y); }
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (const Letter& x : w.letters()) {
      h ^= (static_cast<std::uint64_t>(x.generator) << 1) | (x.inverted ? 1U : 0U);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

enum class BackendKind { free, free_product_cyclic, integers, finite };

inline std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::free: return "free";
    case BackendKind::free_product_cyclic: return "free_product_cyclic";
    case BackendKind::integers: return "integers";
    case BackendKind::finite: return "finite";
  }
  return "unknown";
}

inline constexpr std::size_t kDefaultBallBudget = 5'000'000;

class GroupBackend {
 public:
  static GroupBackend free_group(std::uint32_t rank) {
    if (rank == 0 || rank > 26) {
      fail(ErrorKind::malformed_input, "free group rank must be in [1, 26]");
    }
    GroupBackend g(BackendKind::free);
    g.generator_count_ = rank;
    g.delta_ = 0.0;
    g.build_alphabet();
    return g;
  }

  static GroupBackend free_product_cyclic(std::vector<std::uint32_t> orders) {
    if (orders.empty() || orders.size() > 26) {
      fail(ErrorKind::malformed_input, "free product needs between 1 and 26 factors");
    }
    for (auto o : orders) {
      if (o < 2) fail(ErrorKind::malformed_input, "cyclic factor orders must be >= 2");
    }
    GroupBackend g(BackendKind::free_product_cyclic);
    g.generator_count_ = static_cast<std::uint32_t>(orders.size());
    g.orders_ = std::move(orders);
    // Not a tree; recorded constant, only ever used in R = 2r + 4*delta.
    g.delta_ = 1.0;
    g.build_alphabet();
    return g;
  }

  static GroupBackend integers() {
    GroupBackend g(BackendKind::integers);
    g.generator_count_ = 1;
    g.delta_ = 0.0;
    g.build_alphabet();
    return g;
  }

  // `table[i][j]` is the index of i*j, index 0 is the identity. `generators`
  // lists element indices; empty means every non-identity element.
  static GroupBackend finite(std::vector<std::vector<std::uint32_t>> table,
                             std::vector<std::uint32_t> generators = {}) {
    const std::size_t n = table.size();
    if (n == 0) fail(ErrorKind::malformed_input, "empty multiplication table");
    for (std::size_t i = 0; i < n; ++i) {
      if (table[i].size() != n) fail(ErrorKind::malformed_input, "multiplication table is not square");
      std::vector<bool> row(n, false), col(n, false);
      for (std::size_t j = 0; j < n; ++j) {
        if (table[i][j] >= n || table[j][i] >= n) {
          fail(ErrorKind::malformed_input, "table entry out of range");
        }
        if (row[table[i][j]] || col[table[j][i]]) {
          fail(ErrorKind::malformed_input, "multiplication table is not a Latin square");
        }
        row[table[i][j]] = true;
        col[table[j][i]] = true;
      }
      if (table[0][i] != i || table[i][0] != i) {
        fail(ErrorKind::malformed_input, "element 0 must be the identity");
      }
    }
    if (generators.empty()) {
      for (std::uint32_t i = 1; i < n; ++i) generators.push_back(i);
    }
    for (auto gidx : generators) {
      if (gidx == 0 || gidx >= n) fail(ErrorKind::malformed_input, "bad generator index");
    }
    GroupBackend g(BackendKind::finite);
    g.table_ = std::move(table);
    g.generators_ = std::move(generators);
    g.generator_count_ = static_cast<std::uint32_t>(g.generators_.size());
    g.delta_ = 0.0;
    g.inverse_.assign(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        if (g.table_[i][j] == 0) g.inverse_[i] = j;
      }
    }
    g.build_alphabet();
    g.build_finite_normal_forms();
    return g;
  }

  BackendKind kind() const noexcept { return kind_; }
  double delta() const noexcept { return delta_; }
  void set_delta(double delta) {
    if (delta < 0) fail(ErrorKind::malformed_input, "delta must be non-negative");
    delta_ = delta;
  }
  std::uint32_t generator_count() const noexcept { return generator_count_; }
  const std::vector<std::uint32_t>& orders() const noexcept { return orders_; }
  const std::vector<std::vector<std::uint32_t>>& table() const noexcept { return table_; }
  const std::vector<std::uint32_t>& generators() const noexcept { return generators_; }
  std::size_t finite_order() const noexcept { return table_.size(); }

  // Letters in declaration order: a, A, b, B, ... with inverse letters omitted
  // for self-inverse generators.
  const std::vector<Letter>& alphabet() const noexcept { return alphabet_; }

  bool is_tree() const noexcept {
    return kind_ == BackendKind::free || kind_ == BackendKind::integers;
  }

  bool self_inverse(std::uint32_t gen) const {
    switch (kind_) {
      case BackendKind::free_product_cyclic: return orders_[gen] == 2;
      case BackendKind::finite: return inverse_[generators_[gen]] == generators_[gen];
      default: return false;
    }
  }

  bool valid(Letter x) const noexcept {
    return x.generator < generator_count_;
  }

  Letter invert(Letter x) const {
    if (self_inverse(x.generator)) return {x.generator, false};
    return {x.generator, !x.inverted};
  }

  // Finite backends: element index of a letter and of a normal word.
  std::uint32_t letter_element(Letter x) const {
    std::uint32_t e = generators_[x.generator];
    return x.inverted ? inverse_[e] : e;
  }
  std::uint32_t element_of(const Word& w) const {
    std::uint32_t e = 0;
    for (const Letter& x : w.letters()) e = table_[e][letter_element(x)];
    return e;
  }
  const Word& element_word(std::uint32_t e) const { return finite_words_.at(e); }
  std::uint32_t element_depth(std::uint32_t e) const { return finite_depth_.at(e); }

  // Syllable exponent representative in (-order/2, order/2].
  std::int64_t canonical_exponent(std::uint32_t gen, std::int64_t e) const {
    const auto o = static_cast<std::int64_t>(orders_[gen]);
    std::int64_t r = ((e % o) + o) % o;
    if (2 * r > o) r -= o;
    return r;
  }

  // True when w followed by x is again a normal form of length |w| + 1.
  bool extends_normally(const Word& w, Letter x) const {
    if (w.empty()) {
      if (kind_ != BackendKind::finite) return true;
      return finite_words_[letter_element(x)] == Word{x};
    }
    switch (kind_) {
      case BackendKind::free:
      case BackendKind::integers:
        return w.back() != invert(x);
      case BackendKind::free_product_cyclic: {
        if (w.back().generator != x.generator) return true;
        if (w.back().inverted != x.inverted) return false;
        std::int64_t run = 0;
        for (auto it = w.raw().rbegin(); it != w.raw().rend() && it->generator == x.generator; ++it) ++run;
        const std::int64_t next = x.inverted ? -(run + 1) : run + 1;
        return canonical_exponent(x.generator, next) == next;
      }
      case BackendKind::finite: {
        const std::uint32_t e = table_[element_of(w)][letter_element(x)];
        if (finite_depth_[e] != w.size() + 1) return false;
        const Word& nf = finite_words_[e];
        return nf.back() == x &&
               std::equal(w.letters().begin(), w.letters().end(), nf.letters().begin());
      }
    }
    return false;
  }

  friend bool operator==(const GroupBackend& x, const GroupBackend& y) {
    return x.kind_ == y.kind_ && x.generator_count_ == y.generator_count_ &&
           x.orders_ == y.orders_ && x.table_ == y.table_ && x.generators_ == y.generators_;
  }

 private:
  explicit GroupBackend(BackendKind kind) : kind_(kind) {}

  void build_alphabet() {
    alphabet_.clear();
    for (std::uint32_t g = 0; g < generator_count_; ++g) {
      alphabet_.push_back({g, false});
      if (!self_inverse(g)) alphabet_.push_back({g, true});
    }
  }

  void build_finite_normal_forms() {
    const std::size_t n = table_.size();
    finite_words_.assign(n, Word{});
    finite_depth_.assign(n, UINT32_MAX);
    finite_depth_[0] = 0;
    std::vector<std::uint32_t> frontier{0};
    std::uint32_t depth = 0;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      std::vector<std::uint32_t> next;
      for (auto e : frontier) {
        for (const Letter& x : alphabet_) {
          const std::uint32_t f = table_[e][letter_element(x)];
          if (finite_depth_[f] != UINT32_MAX) continue;
          finite_depth_[f] = depth + 1;
          std::vector<Letter> word = finite_words_[e].raw();
          word.push_back(x);
          finite_words_[f] = Word(std::move(word));
          next.push_back(f);
          ++reached;
        }
      }
      frontier = std::move(next);
      ++depth;
    }
    if (reached != n) fail(ErrorKind::malformed_input, "generators do not generate the group");
  }

  BackendKind kind_;
  double delta_ = 0.0;
  std::uint32_t generator_count_ = 0;
  std::vector<std::uint32_t> orders_;
  std::vector<std::vector<std::uint32_t>> table_;
  std::vector<std::uint32_t> generators_;
  std::vector<std::uint32_t> inverse_;
  std::vector<Letter> alphabet_;
  std::vector<Word> finite_words_;
  std::vector<std::uint32_t> finite_depth_;
};

// ---------------------------------------------------------------------------
// Arithmetic

inline void check_letters(std::span<const Letter> raw, const GroupBackend& g) {
  for (const Letter& x : raw) {
    if (!g.valid(x)) {
      fail(ErrorKind::malformed_input,
           "letter index " + std::to_string(x.generator) + " is not a generator of this backend");
    }
  }
}

inline Word reduce(std::span<const Letter> raw, const GroupBackend& g) {
  check_letters(raw, g);
  std::vector<Letter> out;
  out.reserve(raw.size());
  switch (g.kind()) {
    case BackendKind::free:
    case BackendKind::integers:
      for (const Letter& x : raw) {
        if (!out.empty() && out.back() == g.invert(x)) {
          out.pop_back();
        } else {
          out.push_back(x);
        }
      }
      break;
    case BackendKind::free_product_cyclic:
      for (Letter x : raw) {
        if (g.self_inverse(x.generator)) x.inverted = false;
        std::int64_t run = 0;
        bool negative = false;
        for (auto it = out.rbegin(); it != out.rend() && it->generator == x.generator; ++it) {
          ++run;
          negative = it->inverted;
        }
        std::int64_t e = negative ? -run : run;
        e = g.canonical_exponent(x.generator, e + (x.inverted ? -1 : 1));
        out.resize(out.size() - static_cast<std::size_t>(run));
        const Letter unit{x.generator, e < 0};
        for (std::int64_t k = 0; k < (e < 0 ? -e : e); ++k) out.push_back(unit);
      }
      break;
    case BackendKind::finite: {
      std::uint32_t e = 0;
      for (const Letter& x : raw) e = g.table()[e][g.letter_element(x)];
      return g.element_word(e);
    }
  }
  return Word(std::move(out));
}

inline Word reduce(const Word& w, const GroupBackend& g) { return reduce(w.letters(), g); }

inline Word multiply(const Word& a, const Word& b, const GroupBackend& g) {
  if (g.is_tree()) {
    check_letters(a.letters(), g);
    check_letters(b.letters(), g);
    std::size_t cancel = 0;
    const std::size_t limit = std::min(a.size(), b.size());
    while (cancel < limit && a[a.size() - 1 - cancel] == g.invert(b[cancel])) ++cancel;
    std::vector<Letter> out;
    out.reserve(a.size() + b.size() - 2 * cancel);
    out.insert(out.end(), a.raw().begin(), a.raw().end() - static_cast<std::ptrdiff_t>(cancel));
    out.insert(out.end(), b.raw().begin() + static_cast<std::ptrdiff_t>(cancel), b.raw().end());
    return Word(std::move(out));
  }
  std::vector<Letter> cat;
  cat.reserve(a.size() + b.size());
  cat.insert(cat.end(), a.raw().begin(), a.raw().end());
  cat.insert(cat.end(), b.raw().begin(), b.raw().end());
  return reduce(cat, g);
}

inline Word inverse(const Word& a, const GroupBackend& g) {
  std::vector<Letter> out;
  out.reserve(a.size());
  for (auto it = a.raw().rbegin(); it != a.raw().rend(); ++it) out.push_back(g.invert(*it));
  if (g.is_tree()) return Word(std::move(out));
  return reduce(out, g);
}

inline Word power(const Word& a, std::int64_t n, const GroupBackend& g) {
  if (n < 0) return power(inverse(a, g), -n, g);
  Word result;
  Word base = a;
  while (n > 0) {
    if (n & 1) result = multiply(result, base, g);
    n >>= 1;
    if (n > 0) base = multiply(base, base, g);
  }
  return result;
}

// Exact geodesic length; normal forms are geodesic words.
inline std::size_t word_length(const Word& a, const GroupBackend&) {
  return a.size();
}

inline std::size_t distance(const Word& a, const Word& b, const GroupBackend& g) {
  return multiply(inverse(a, g), b, g).size();
}

// <x.y> based at the identity. Always a half-integer.
inline double gromov_product(const Word& x, const Word& y, const GroupBackend& g) {
  const auto d = static_cast<double>(distance(x, y, g));
  return (static_cast<double>(x.size()) + static_cast<double>(y.size()) - d) / 2.0;
}

// Tree backends: w = u c u^-1 with c cyclically reduced.
struct CyclicDecomposition {
  Word conjugator;
  Word core;
};

inline CyclicDecomposition cyclic_decomposition(const Word& w, const GroupBackend& g) {
  std::size_t k = 0;
  while (2 * k + 1 < w.size() && w[k] == g.invert(w[w.size() - 1 - k])) ++k;
  std::vector<Letter> u(w.raw().begin(), w.raw().begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<Letter> c(w.raw().begin() + static_cast<std::ptrdiff_t>(k),
                        w.raw().end() - static_cast<std::ptrdiff_t>(k));
  return {Word(std::move(u)), Word(std::move(c))};
}

// Finite-order test. Free and integer groups are torsion-free; in a free
// product of cyclics an element has finite order iff its cyclic reduction is a
// single syllable.
inline bool has_infinite_order(const Word& w, const GroupBackend& g) {
  if (w.empty()) return false;
  switch (g.kind()) {
    case BackendKind::free:
    case BackendKind::integers:
      return true;
    case BackendKind::finite:
      return false;
    case BackendKind::free_product_cyclic: {
      // Cyclically reduce by conjugating the last syllable to the front; the
      // element has finite order iff at most one syllable survives.
      Word cur = w;
      for (;;) {
        if (cur.empty()) return false;
        std::size_t tail = cur.size();
        while (tail > 0 && cur[tail - 1].generator == cur.back().generator) --tail;
        if (tail == 0) return false;
        if (cur.front().generator != cur.back().generator) return true;
        std::vector<Letter> rotated(cur.raw().begin() + static_cast<std::ptrdiff_t>(tail), cur.raw().end());
        rotated.insert(rotated.end(), cur.raw().begin(), cur.raw().begin() + static_cast<std::ptrdiff_t>(tail));
        cur = reduce(rotated, g);
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Balls

struct Ball {
  std::size_t radius = 0;
  std::vector<Word> elements;
};

namespace detail {

template <typename Visit>
bool ball_dfs(Word& current, std::size_t target, const GroupBackend& g, Visit& visit) {
  if (current.size() == target) return visit(static_cast<const Word&>(current));
  for (const Letter& x : g.alphabet()) {
    if (!g.extends_normally(current, x)) continue;
    current.raw().push_back(x);
    const bool keep_going = ball_dfs(current, target, g, visit);
    current.raw().pop_back();
    if (!keep_going) return false;
  }
  return true;
}

}  // namespace detail

// Streams every element of the sphere of radius `length` in shortlex order
// using memory linear in `length`. `visit` returns false to stop early.
template <typename Visit>
bool for_each_in_sphere(std::size_t length, const GroupBackend& g, Visit&& visit) {
  Word current;
  current.raw().reserve(length);
  return detail::ball_dfs(current, length, g, visit);
}

template <typename Visit>
bool for_each_in_ball(std::size_t radius, const GroupBackend& g, Visit&& visit) {
  for (std::size_t n = 0; n <= radius; ++n) {
    if (!for_each_in_sphere(n, g, visit)) return false;
  }
  return true;
}

inline Ball enumerate_ball(std::size_t radius, const GroupBackend& g,
                           std::size_t budget = kDefaultBallBudget) {
  Ball ball;
  ball.radius = radius;
  std::vector<Word> sphere{Word{}};
  ball.elements.push_back(Word{});
  for (std::size_t n = 1; n <= radius; ++n) {
    std::vector<Word> next;
    for (const Word& w : sphere) {
      for (const Letter& x : g.alphabet()) {
        if (!g.extends_normally(w, x)) continue;
        std::vector<Letter> letters = w.raw();
        letters.push_back(x);
        next.emplace_back(std::move(letters));
        if (ball.elements.size() + next.size() > budget) {
          fail(ErrorKind::capacity, "ball budget of " + std::to_string(budget) +
                                        " elements exceeded; complete up to radius " +
                                        std::to_string(n - 1));
        }
      }
    }
    if (next.empty()) break;
    ball.elements.insert(ball.elements.end(), next.begin(), next.end());
    sphere = std::move(next);
  }
  return ball;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_word(const Word& w, const GroupBackend& g) {
  switch (g.kind()) {
    case BackendKind::free: {
      if (w.empty()) return "1";
      std::string s;
      for (const Letter& x : w.letters()) {
        s.push_back(static_cast<char>((x.inverted ? 'A' : 'a') + x.generator));
      }
      return s;
    }
    case BackendKind::integers: {
      const auto n = static_cast<std::int64_t>(w.size());
      return std::to_string(!w.empty() && w.front().inverted ? -n : n);
    }
    case BackendKind::free_product_cyclic: {
      if (w.empty()) return "1";
      std::string s;
      std::size_t i = 0;
      while (i < w.size()) {
        std::size_t j = i;
        while (j < w.size() && w[j].generator == w[i].generator) ++j;
        if (!s.empty()) s += "·";
        const auto e = static_cast<std::int64_t>(j - i);
        s.push_back(static_cast<char>('a' + w[i].generator));
        s += "^" + std::to_string(w[i].inverted ? -e : e);
        i = j;
      }
      return s;
    }
    case BackendKind::finite:
      return std::to_string(g.element_of(w));
  }
  return {};
}

namespace detail {

inline std::int64_t parse_int(std::string_view s) {
  std::int64_t value = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorKind::malformed_input, "bad integer '" + std::string(s) + "'");
  }
  return value;
}

inline void append_letters(std::vector<Letter>& out, std::string_view s) {
  for (char c : s) {
    if (c >= 'a' && c <= 'z') {
      out.push_back({static_cast<std::uint32_t>(c - 'a'), false});
    } else if (c >= 'A' && c <= 'Z') {
      out.push_back({static_cast<std::uint32_t>(c - 'A'), true});
    } else {
      fail(ErrorKind::malformed_input, std::string("unexpected character '") + c + "' in word");
    }
  }
}

}  // namespace detail

inline Word parse_word(std::string_view text, const GroupBackend& g) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  std::vector<Letter> raw;
  switch (g.kind()) {
    case BackendKind::free:
      if (text.empty() || text == "1") return Word{};
      detail::append_letters(raw, text);
      break;
    case BackendKind::integers: {
      if (text.empty()) return Word{};
      const char c = text.front();
      if ((c >= '0' && c <= '9') || c == '-' || c == '+') {
        const std::int64_t n = detail::parse_int(text);
        const Letter unit{0, n < 0};
        for (std::int64_t k = 0; k < (n < 0 ? -n : n); ++k) raw.push_back(unit);
      } else {
        detail::append_letters(raw, text);
      }
      break;
    }
    case BackendKind::free_product_cyclic: {
      if (text.empty() || text == "1") return Word{};
      std::string normalized(text);
      for (std::size_t pos; (pos = normalized.find("·")) != std::string::npos;) {
        normalized.replace(pos, 2, " ");
      }
      for (char& c : normalized) {
        if (c == '.' || c == '*') c = ' ';
      }
      std::size_t i = 0;
      while (i < normalized.size()) {
        if (normalized[i] == ' ') {
          ++i;
          continue;
        }
        std::size_t j = normalized.find(' ', i);
        if (j == std::string::npos) j = normalized.size();
        std::string_view token(normalized.data() + i, j - i);
        const std::size_t caret = token.find('^');
        std::vector<Letter> base;
        detail::append_letters(base, token.substr(0, caret));
        std::int64_t e = 1;
        if (caret != std::string_view::npos) e = detail::parse_int(token.substr(caret + 1));
        if (base.size() != 1 && caret != std::string_view::npos) {
          fail(ErrorKind::malformed_input, "exponent must follow a single generator");
        }
        for (const Letter& x : base) {
          const Letter unit{x.generator, (e < 0) != x.inverted};
          for (std::int64_t k = 0; k < (e < 0 ? -e : e); ++k) raw.push_back(unit);
        }
        i = j;
      }
      break;
    }
    case BackendKind::finite: {
      if (text.empty()) return Word{};
      const std::int64_t e = detail::parse_int(text);
      if (e < 0 || static_cast<std::size_t>(e) >= g.finite_order()) {
        fail(ErrorKind::malformed_input, "element index out of range");
      }
      return g.element_word(static_cast<std::uint32_t>(e));
    }
  }
  return reduce(raw, g);
}

inline Json backend_to_json(const GroupBackend& g) {
  Json j;
  j["kind"] = std::string(to_string(g.kind()));
  switch (g.kind()) {
    case BackendKind::free: j["rank"] = g.generator_count(); break;
    case BackendKind::free_product_cyclic: j["orders"] = g.orders(); break;
    case BackendKind::integers: break;
    case BackendKind::finite:
      j["table"] = g.table();
      j["generators"] = g.generators();
      break;
  }
  j["delta"] = g.delta();
  return j;
}

inline GroupBackend backend_from_json(const Json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<GroupBackend> g;
    if (kind == "free") {
      g = GroupBackend::free_group(j.at("rank").get<std::uint32_t>());
    } else if (kind == "free_product_cyclic") {
      g = GroupBackend::free_product_cyclic(j.at("orders").get<std::vector<std::uint32_t>>());
    } else if (kind == "integers") {
      g = GroupBackend::integers();
    } else if (kind == "finite") {
      std::vector<std::uint32_t> gens;
      if (j.contains("generators")) gens = j.at("generators").get<std::vector<std::uint32_t>>();
      g = GroupBackend::finite(j.at("table").get<std::vector<std::vector<std::uint32_t>>>(), gens);
    } else {
      fail(ErrorKind::malformed_input, "unknown backend kind '" + kind + "'");
    }
    if (j.contains("delta")) g->set_delta(j.at("delta").get<double>());
    return *g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::malformed_input, std::string("bad backend descriptor: ") + e.what());
  }
}

}  // namespace monotile
