#pragma once

#include <cctype>
#include <random>
#include <string>

#include "monotile/group.hpp"

namespace testing_support {

// Free reduction on letter strings (lowercase generator, uppercase inverse),
// written independently of the library.
inline std::string free_reduce(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!out.empty() && out.back() != c &&
        std::tolower(static_cast<unsigned char>(out.back())) == std::tolower(static_cast<unsigned char>(c))) {
      out.pop_back();
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::string free_inverse(const std::string& s) {
  std::string out(s.rbegin(), s.rend());
  for (char& c : out) {
    c = std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c))
                                                      : static_cast<char>(std::tolower(c));
  }
  return out;
}

inline std::string free_power(const std::string& s, int n) {
  std::string base = n >= 0 ? s : free_inverse(s);
  std::string out;
  for (int k = 0; k < (n >= 0 ? n : -n); ++k) out += base;
  return free_reduce(out);
}

inline std::string random_reduced(std::mt19937_64& rng, std::size_t len, int rank = 2) {
  static const std::string letters = "aAbBcCdD";
  std::string out;
  while (out.size() < len) {
    char c = letters[rng() % static_cast<std::uint64_t>(2 * rank)];
    std::string next = free_reduce(out + c);
    if (next.size() == out.size() + 1) out = next;
  }
  return out;
}

inline std::string str(const monotile::Word& w, const monotile::GroupBackend& g) {
  std::string s = monotile::format_word(w, g);
  return s == "1" ? "" : s;
}

inline monotile::Word word(const std::string& s, const monotile::GroupBackend& g) {
  return monotile::parse_word(s.empty() ? "1" : s, g);
}

}  // namespace testing_support
