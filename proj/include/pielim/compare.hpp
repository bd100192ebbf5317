#pragma once

// Isomorphism and equivalence testing for finite categories.
//
// The isomorphism search is exact: color refinement narrows the candidates,
// a backtracking search over a generating set decides, and every reported
// witness is re-verified before it is returned. Exceeding the candidate
// budget raises resource_error; the search never returns a wrong verdict.
//
// Equivalence reduces to isomorphism of skeletons. A skeletal finite
// category has no isomorphic pairs of distinct objects, and an equivalence
// between skeletal categories is bijective on objects, hence an isomorphism,
// so comparing skeletons decides equivalence of the originals.

#include <optional>
#include <string>

#include "pielim/fincat.hpp"

namespace pielim {

enum class CompareMode { Isomorphism, Equivalence };

struct CompareResult {
  bool match = false;
  std::string mode;                           // "iso" or "equivalence"
  std::optional<FinFunctor> witness;          // a -> b when match
  std::optional<FinFunctor> witness_inverse;  // filled in iso mode
  std::uint64_t nodes = 0;                    // search nodes explored
  std::string detail;  // reason when !match, verification note when match
};

// Skeleton data: the full subcategory on the lexicographically least object
// of each isomorphism class, plus a chosen iso from every object to its
// class representative (the identity on representatives themselves).
struct Skeleton {
  CatPtr cat;
  std::vector<std::uint32_t> rep;     // ambient object -> representative
  std::vector<std::uint32_t> to_rep;  // ambient object -> invertible x -> rep(x)
};

Skeleton skeleton_of(const CatPtr& c);

CompareResult compare_categories(const CatPtr& a, const CatPtr& b, CompareMode mode,
                                 BudgetMeter& meter);

}  // namespace pielim
