#pragma once

// Shared plumbing: error taxonomy, enumeration budgets, canonical id
// encoding, and the digest used for provenance blocks.
//
// Error taxonomy mirrors the CLI exit codes:
//   input_error    -> malformed or unresolvable input (exit 2)
//   resource_error -> an enumeration or size budget was exceeded (exit 3)
// Failed mathematical checks are ordinary return values, not exceptions.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pielim {

struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Budgets bound every open-ended enumeration. Exceeding one raises
// resource_error; nothing is ever silently truncated. `candidates` counts
// enumeration tree nodes (candidate tuples visited, kept or not), the other
// three bound the size of any single materialized category.
struct Budget {
  std::uint64_t candidates = 1'000'000;
  std::uint64_t max_objects = 100'000;
  std::uint64_t max_morphisms = 300'000;
  std::uint64_t max_comp_entries = 15'000'000;

  Budget scaled(std::uint64_t numer, std::uint64_t denom = 1'000'000) const {
    auto mul = [&](std::uint64_t v) {
      long double x = static_cast<long double>(v) * numer / denom;
      return x > 1e18L ? static_cast<std::uint64_t>(1e18L)
                       : static_cast<std::uint64_t>(x < 1 ? 1 : x);
    };
    Budget b;
    b.candidates = mul(candidates);
    b.max_objects = mul(max_objects);
    b.max_morphisms = mul(max_morphisms);
    b.max_comp_entries = mul(max_comp_entries);
    return b;
  }
};

// Mutable spend counter threaded through one operation.
struct BudgetMeter {
  const Budget limits;
  std::uint64_t spent_candidates = 0;

  explicit BudgetMeter(const Budget& b) : limits(b) {}

  void spend(std::uint64_t n, const char* where) {
    spent_candidates += n;
    if (spent_candidates > limits.candidates)
      throw resource_error(std::string("candidate budget exceeded in ") + where);
  }
  void check_objects(std::uint64_t n, const char* where) const {
    if (n > limits.max_objects)
      throw resource_error(std::string("object budget exceeded in ") + where);
  }
  void check_morphisms(std::uint64_t n, const char* where) const {
    if (n > limits.max_morphisms)
      throw resource_error(std::string("morphism budget exceeded in ") + where);
  }
  void check_comp(std::uint64_t n, const char* where) const {
    if (n > limits.max_comp_entries)
      throw resource_error(std::string("composition-table budget exceeded in ") + where);
  }
};

// Canonical encodings for generated identifiers. Every constructed object or
// morphism id is the encoding of its defining tuple, so enumeration order in
// lexicographic id order is reproducible across runs and platforms.
inline std::string enc_tuple(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i];
  }
  out += ")";
  return out;
}

inline std::string enc_call(const std::string& head,
                            const std::vector<std::pair<std::string, std::string>>& args) {
  std::string out = head + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ";";
    out += args[i].first + "=" + args[i].second;
  }
  out += ")";
  return out;
}

// FNV-1a 64-bit over canonical serializations. Provenance integrity only,
// not a security boundary.
struct Digest {
  std::uint64_t state = 1469598103934665603ULL;
  void feed(const void* data, std::size_t n) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 1099511628211ULL;
    }
  }
  void feed(const std::string& s) {
    feed(s.data(), s.size());
    feed("\x1f", 1);
  }
  std::uint64_t value() const { return state; }
  std::string hex() const {
    static const char* d = "0123456789abcdef";
    std::string out(16, '0');
    std::uint64_t v = state;
    for (int i = 15; i >= 0; --i) {
      out[static_cast<std::size_t>(i)] = d[v & 0xf];
      v >>= 4;
    }
    return out;
  }
};

// Provenance block embedded in construction outputs for golden-file testing.
struct Provenance {
  std::string construction;
  std::vector<std::pair<std::string, std::string>> inputs;  // label -> digest hex
};

}  // namespace pielim
