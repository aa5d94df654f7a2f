#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "stx/common.hpp"

namespace stx {

// Finite symbol set. A symbol's index is its position in the declared order;
// every tensor and product construction uses that positional encoding.
struct Alphabet {
  std::string name;
  std::vector<std::string> symbols;

  Alphabet() = default;
  Alphabet(std::string n, std::vector<std::string> syms)
      : name(std::move(n)), symbols(std::move(syms)) {
    if (symbols.empty()) throw std::invalid_argument("Alphabet: empty symbol list");
    for (std::size_t i = 0; i < symbols.size(); ++i)
      for (std::size_t j = i + 1; j < symbols.size(); ++j)
        if (symbols[i] == symbols[j])
          throw std::invalid_argument("Alphabet: duplicate symbol '" + symbols[i] + "'");
  }

  int size() const { return static_cast<int>(symbols.size()); }

  int index_of(const std::string& s) const {
    auto it = std::find(symbols.begin(), symbols.end(), s);
    if (it == symbols.end())
      throw std::invalid_argument("Alphabet '" + name + "': unknown symbol '" + s + "'");
    return static_cast<int>(it - symbols.begin());
  }

  bool operator==(const Alphabet& o) const { return symbols == o.symbols; }
};

// Binary alphabet {"0","1"}; the workhorse of the test fixtures.
inline Alphabet binary_alphabet(std::string name = "B") {
  return Alphabet(std::move(name), {"0", "1"});
}

// One-symbol alphabet, used as the empty product (input of source nodes).
inline Alphabet singleton_alphabet(std::string name = "unit") {
  return Alphabet(std::move(name), {"*"});
}

// Product alphabet with the first factor as the most significant digit:
// index(a,b) = index(a) * |B| + index(b). Symbols are joined with ','.
inline Alphabet product_alphabet(const Alphabet& a, const Alphabet& b) {
  std::vector<std::string> syms;
  syms.reserve(static_cast<std::size_t>(a.size()) * b.size());
  for (const auto& sa : a.symbols)
    for (const auto& sb : b.symbols) syms.push_back(sa + "," + sb);
  return Alphabet(a.name + "x" + b.name, std::move(syms));
}

inline Alphabet product_alphabet(const std::vector<Alphabet>& parts) {
  if (parts.empty()) return singleton_alphabet();
  Alphabet acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc = product_alphabet(acc, parts[i]);
  return acc;
}

}  // namespace stx
