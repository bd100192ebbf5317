#pragma once

// Builders for the standard small categories used across tests, the
// acceptance suite, and emit-corpus. All ids are short and stable; the
// finset skeleton encodes functions in their ids so every hom element is
// self-describing.

#include <vector>

#include "pielim/fincat.hpp"

namespace pielim {

CatPtr terminal_category();            // one object "*"
CatPtr discrete_category(int n);       // objects "d0".."d{n-1}", identities only
CatPtr arrow_category();               // "0" -> "1"
CatPtr parallel_pair_category();       // f,g : "a" => "b"
CatPtr walking_iso_category();         // u : "a" ~ "b" : v
CatPtr chain_poset(int n);             // poset 0 < 1 < ... < n-1
CatPtr grid_poset_2x2();               // product poset {0<1} x {0<1}
CatPtr finset_skeleton(int maxn);      // sets of size 0..maxn, all functions

// the fixed nine-category corpus, in canonical order
std::vector<std::pair<std::string, CatPtr>> standard_corpus();

}  // namespace pielim
