#pragma once

// Small strict 2-categories, strict 2-functors into finite categories, and
// their lax, oplax, pseudo and weighted pseudo limits. Each limit exists
// twice: a direct enumeration of objects-with-connectors, and a build
// through the tuple engine (product, one inserter slot per one-cell, named
// object conditions), with a data-located isomorphism between the two.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pielim/engine.hpp"
#include "pielim/fincat.hpp"

namespace pielim {

struct OneCell {
  std::string id;
  std::uint32_t src = 0, tgt = 0;  // object indices
};

struct TwoCellRec {
  std::string id;
  std::uint32_t src = 0, tgt = 0;  // parallel one-cell indices
};

// A 2-category as explicit sorted tables, following the FinCategory
// conventions: composition keys are (second << 32 | first) with "after"
// order for one-cell composition and vertical composition, and "beside"
// order (left factor lives at the target end) for horizontal composition.
struct TwoCategory {
  std::string name;
  std::vector<std::string> objects;   // sorted
  std::vector<OneCell> one_cells;     // sorted by id
  std::vector<TwoCellRec> two_cells;  // sorted by id
  std::vector<std::uint32_t> id_one;  // identity one-cell per object
  std::vector<std::uint32_t> id_two;  // identity two-cell per one-cell
  std::vector<std::pair<std::uint64_t, std::uint32_t>> one_comp;   // b . a
  std::vector<std::pair<std::uint64_t, std::uint32_t>> two_vcomp;  // s . t
  std::vector<std::pair<std::uint64_t, std::uint32_t>> two_hcomp;  // s * t

  std::uint32_t n_objects() const { return static_cast<std::uint32_t>(objects.size()); }
  std::uint32_t n_one_cells() const { return static_cast<std::uint32_t>(one_cells.size()); }
  std::uint32_t n_two_cells() const { return static_cast<std::uint32_t>(two_cells.size()); }

  std::uint32_t object_index(const std::string& id) const;
  std::uint32_t one_cell_index(const std::string& id) const;
  std::uint32_t two_cell_index(const std::string& id) const;
  bool one_is_identity(std::uint32_t a) const { return id_one[one_cells[a].src] == a; }
  bool two_is_identity(std::uint32_t t) const { return id_two[two_cells[t].src] == t; }

  std::optional<std::uint32_t> compose_one_opt(std::uint32_t b, std::uint32_t a) const;
  std::uint32_t compose_one(std::uint32_t b, std::uint32_t a) const;  // b after a
  std::optional<std::uint32_t> vcomp_opt(std::uint32_t s, std::uint32_t t) const;
  std::uint32_t vcomp(std::uint32_t s, std::uint32_t t) const;  // s after t
  std::optional<std::uint32_t> hcomp_opt(std::uint32_t s, std::uint32_t t) const;
  std::uint32_t hcomp(std::uint32_t s, std::uint32_t t) const;  // s beside t

  std::uint64_t digest() const;
  std::string digest_hex() const;
};

using TwoCatPtr = std::shared_ptr<const TwoCategory>;

// String-keyed assembly. build() sorts everything, resolves names, and fills
// in the composites forced by the unit laws (composition with identity
// one-cells, vertical and horizontal units, horizontal composites of
// identity two-cells); remaining composites must be given explicitly.
// build() itself only checks shape, so unlawful tables can be constructed
// on purpose and handed to validate_two_category.
class TwoCategoryBuilder {
 public:
  explicit TwoCategoryBuilder(std::string name = "") : name_(std::move(name)) {}

  TwoCategoryBuilder& object(const std::string& id);
  TwoCategoryBuilder& one_cell(const std::string& id, const std::string& src,
                               const std::string& tgt);
  TwoCategoryBuilder& identity_one(const std::string& obj, const std::string& cell);
  TwoCategoryBuilder& two_cell(const std::string& id, const std::string& src,
                               const std::string& tgt);
  TwoCategoryBuilder& identity_two(const std::string& cell, const std::string& two);
  TwoCategoryBuilder& compose_one_rule(const std::string& b, const std::string& a,
                                       const std::string& ba);
  TwoCategoryBuilder& vcomp_rule(const std::string& s, const std::string& t,
                                 const std::string& st);
  TwoCategoryBuilder& hcomp_rule(const std::string& s, const std::string& t,
                                 const std::string& st);

  TwoCatPtr build() const;

 private:
  std::string name_;
  std::vector<std::string> objects_;
  std::vector<std::array<std::string, 3>> one_cells_;
  std::vector<std::array<std::string, 3>> two_cells_;
  std::vector<std::array<std::string, 2>> id_one_, id_two_;
  std::vector<std::array<std::string, 3>> one_rules_, v_rules_, h_rules_;
};

// Exhaustive law check: endpoint consistency, parallelism of two-cells,
// closure/units/associativity of all three compositions, horizontal
// composition preserving identity two-cells, and interchange on every
// checkable quadruple (the witness lists the four two-cells).
ValidationReport validate_two_category(const TwoCategory& g);

// Stock shapes. Ids follow the one-category corpus: objects "0", "1", ...,
// identity one-cell "id{o}", identity two-cell "i{cell}".
TwoCatPtr two_cat_terminal();
TwoCatPtr two_cat_discrete(int n);
TwoCatPtr two_cat_arrow();         // a : 0 -> 1
TwoCatPtr two_cat_chain();         // a : 0 -> 1, b : 1 -> 2, ba
TwoCatPtr two_cat_walking_cell();  // a, b : 0 -> 1 and t : a => b
TwoCatPtr two_cat_cospan();        // a : 0 -> 2 <- 1 : b

// Strict 2-functor with values in finite categories (held by reference):
// a category per object, a functor per one-cell, a natural transformation
// per two-cell.
struct TwoFunctor {
  TwoCatPtr source;
  std::vector<CatPtr> obs;
  std::vector<FinFunctor> ones;
  std::vector<NatTransformation> twos;
};

// Fills the slots forced by strictness from the explicit ones: identity
// one-cells become identity functors, identity two-cells identity
// transformations, and composites are computed from already-known values
// until nothing is missing. Throws input_error if a slot stays undefined.
TwoFunctor make_two_functor(const TwoCatPtr& g, std::vector<CatPtr> obs,
                            const std::vector<std::pair<std::string, FinFunctor>>& ones = {},
                            const std::vector<std::pair<std::string, NatTransformation>>& twos = {});

// The diagram with every value the terminal category; weighting by it cuts
// a weighted pseudolimit down to the conical one.
TwoFunctor terminal_weight(const TwoCatPtr& g);

// Strictness is checked exhaustively: every composite and identity cell must
// map to the composite and identity of the images on the nose.
ValidationReport validate_two_functor(const TwoFunctor& h);

std::string two_functor_digest_hex(const TwoFunctor& h);

// A materialized lax/oplax/pseudo limit with its locating data. For an
// object i, carrier[i][g] is the component at source object g and
// connector[i][a] the connector morphism at one-cell a (an identity on
// identity one-cells); for a morphism m, component[m][g] is its component.
// Connectors run H(a)(X_g) -> X_d for the lax limit and X_d -> H(a)(X_g)
// for the oplax one; morphisms are component families making every
// connector square commute.
struct TwoLimitResult {
  CatPtr cat;
  std::vector<std::vector<std::uint32_t>> carrier;
  std::vector<std::vector<std::uint32_t>> connector;
  std::vector<std::vector<std::uint32_t>> component;
};

TwoLimitResult lax_limit_direct(const TwoFunctor& h, const Budget& budget = Budget{});
TwoLimitResult oplax_limit_direct(const TwoFunctor& h, const Budget& budget = Budget{});
// The full subcategory of the lax limit on objects with every connector
// invertible; the same filter on the oplax side gives an isomorphic result.
TwoLimitResult pseudo_limit_direct(const TwoFunctor& h, const Budget& budget = Budget{});

// Projection to the value at one source object, read off the stored data.
FinFunctor two_limit_projection(const TwoLimitResult& r, const TwoFunctor& h, std::uint32_t obj);

// Tuple-engine specs for the same limits: one factor per source object, one
// slot per one-cell, and the named object conditions "unit", "composition"
// and "two-cell". The pseudo spec uses the oplax orientation and adds the
// intrinsic "invertible" condition that turns the inserter into an
// isomorpher; the three named conditions are the ones the liveness tests
// drop, the intrinsic one is part of the construction itself.
TupleSpec lax_limit_pie_spec(const TwoFunctor& h);
TupleSpec oplax_limit_pie_spec(const TwoFunctor& h);
TupleSpec pseudo_limit_pie_spec(const TwoFunctor& h);

struct TwoLimitPie {
  TupleResult pie;
  TwoLimitResult direct;
  FinFunctor witness;  // direct.cat -> pie.cat, an isomorphism
};

TwoLimitPie lax_limit_via_pie(const TwoFunctor& h, const Budget& budget = Budget{});
TwoLimitPie oplax_limit_via_pie(const TwoFunctor& h, const Budget& budget = Budget{});
// The witness inverts every connector: the direct side stores the lax
// orientation, the engine side the oplax one.
TwoLimitPie pseudo_limit_via_pie(const TwoFunctor& h, const Budget& budget = Budget{});

// Weighted pseudolimit {W, H} for a weight W and diagram H over one shape.
// Objects are pseudonatural transformations W -> H: a functor per source
// object and an invertible filler H(a) . F_g => F_d . W(a) per one-cell,
// with identity fillers on identity one-cells, pasting fillers on
// composites, and compatibility with every two-cell. Morphisms are
// modifications. Fillers and modification cells are stored per source
// object of the relevant W value, flattened in source order.
struct WeightedResult {
  CatPtr cat;
  std::vector<std::vector<FinFunctor>> functors;       // enumerated W(g) -> H(g), per source object
  std::vector<std::vector<std::uint32_t>> functor_at;  // per object, index into functors[g]
  std::vector<std::vector<std::uint32_t>> filler;      // per object, one-cell-major components
  std::vector<std::vector<std::uint32_t>> component;   // per morphism, object-major components
};

WeightedResult weighted_pseudolimit(const TwoFunctor& w, const TwoFunctor& h,
                                    const Budget& budget = Budget{});

}  // namespace pielim
