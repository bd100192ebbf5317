#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pielim/fincat.hpp"

namespace pielim {

// Lazy joint-inserter-plus-joint-equifier over a product of factor
// categories.
//
// Conceptually: K' is the product of the factors, each slot contributes the
// parallel pair (P . pi_src, Q . pi_tgt) : K' -> L, and the result is the
// full subcategory of the joint inserter over K' on the objects every family
// keeps. Neither K' nor the ambient inserter is materialized: candidate
// objects are enumerated factor by factor, filtered, and only the surviving
// subcategory is built. Generated ids coincide with the materialized pie
// pipeline, so small instances can be compared against it verbatim.

struct TupleSlot {
  std::uint32_t src_factor = 0;
  std::uint32_t tgt_factor = 0;
  FinFunctor p;  // factors[src_factor] -> L
  FinFunctor q;  // factors[tgt_factor] -> L, same target category
};

struct TupleObject {
  std::vector<std::uint32_t> carrier;    // object index per factor
  std::vector<std::uint32_t> structure;  // morphism index in the slot target, per slot
};

// Object-level condition cutting the inserter down; the name is what the
// liveness tests drop by.
struct EquifierFamily {
  std::string name;
  std::function<bool(const TupleObject&)> keep;
};

struct TupleSpec {
  std::string name;
  std::vector<CatPtr> factors;
  std::vector<TupleSlot> slots;
  std::vector<EquifierFamily> families;
  std::optional<Provenance> prov;
};

struct TupleResult {
  CatPtr cat;
  std::vector<CatPtr> factors;
  std::vector<TupleObject> objects;                     // per built object
  std::vector<std::vector<std::uint32_t>> mor_carrier;  // per built morphism, per factor
};

TupleResult build_tuple_category(const TupleSpec& spec, const Budget& budget = Budget{});

// Survivor count alone; nothing is materialized and only the object limits
// apply. For instances whose morphism tables exceed any reasonable budget.
std::uint64_t count_tuple_objects(const TupleSpec& spec, const Budget& budget = Budget{});

// Projection to one factor, read off the stored carrier data.
FinFunctor tuple_factor_projection(const TupleResult& r, std::uint32_t factor);

}  // namespace pielim
