#pragma once

// Finite categories as explicit tables, plus functors and natural
// transformations between them.
//
// Conventions used everywhere downstream:
//   - all identifiers are strings; objects and morphisms are stored sorted
//     lexicographically by id, and all enumeration follows that order;
//   - compose(g, f) is "g after f", defined exactly when tgt(f) = src(g);
//   - values are immutable once built and shared via shared_ptr;
//   - structural identity ignores the display name and provenance.
//
// Law checking is split off from construction: building resolves identifiers
// (dangling references are input errors) but does not trust or verify the
// category laws. validate_category does the exhaustive law scan; parsing from
// files runs it eagerly, internal constructions are covered by tests instead.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pielim/base.hpp"

namespace pielim {

struct MorRec {
  std::string id;
  std::uint32_t src = 0;
  std::uint32_t tgt = 0;
};

inline std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

class FinCategory {
 public:
  std::string name;
  std::vector<std::string> objects;   // sorted lexicographically
  std::vector<MorRec> morphisms;      // sorted lexicographically by id
  std::vector<std::uint32_t> identity;  // per object index
  // composition table, key = (g << 32 | f) for g after f, sorted by key
  std::vector<std::pair<std::uint64_t, std::uint32_t>> comp;
  std::optional<Provenance> provenance;

  std::unordered_map<std::string, std::uint32_t> obj_ix;
  std::unordered_map<std::string, std::uint32_t> mor_ix;
  // hom sets keyed by (src << 32 | tgt); morphism indices in id order
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> homs;

  std::uint32_t n_objects() const { return static_cast<std::uint32_t>(objects.size()); }
  std::uint32_t n_morphisms() const { return static_cast<std::uint32_t>(morphisms.size()); }

  std::uint32_t src(std::uint32_t m) const { return morphisms[m].src; }
  std::uint32_t tgt(std::uint32_t m) const { return morphisms[m].tgt; }
  const std::string& obj_id(std::uint32_t o) const { return objects[o]; }
  const std::string& mor_id(std::uint32_t m) const { return morphisms[m].id; }

  std::uint32_t object_index(const std::string& id) const;
  std::uint32_t morphism_index(const std::string& id) const;
  std::optional<std::uint32_t> find_object(const std::string& id) const;
  std::optional<std::uint32_t> find_morphism(const std::string& id) const;

  bool is_identity(std::uint32_t m) const {
    return identity[morphisms[m].src] == m && morphisms[m].src == morphisms[m].tgt;
  }

  std::optional<std::uint32_t> compose_opt(std::uint32_t g, std::uint32_t f) const;
  // g after f; internal logic error if the pair is not in the table
  std::uint32_t compose(std::uint32_t g, std::uint32_t f) const;

  const std::vector<std::uint32_t>& hom(std::uint32_t x, std::uint32_t y) const;

  // two-sided inverse if the morphism is invertible
  std::optional<std::uint32_t> inverse(std::uint32_t m) const;

  bool structurally_equal(const FinCategory& other) const;
  std::uint64_t digest() const;  // cached on first use
  std::string digest_hex() const;

 private:
  mutable std::uint64_t digest_cache_ = 0;
  mutable bool digest_ready_ = false;
};

using CatPtr = std::shared_ptr<const FinCategory>;

bool same_category(const CatPtr& a, const CatPtr& b);

// Incremental builder. Accepts entries in any order, sorts canonically, and
// resolves ids on build(); duplicate or dangling ids are input errors.
class FinCategoryBuilder {
 public:
  explicit FinCategoryBuilder(std::string name = "") : name_(std::move(name)) {}

  FinCategoryBuilder& object(const std::string& id);
  FinCategoryBuilder& morphism(const std::string& id, const std::string& src,
                               const std::string& tgt);
  FinCategoryBuilder& identity(const std::string& obj, const std::string& mor);
  FinCategoryBuilder& compose_rule(const std::string& g, const std::string& f,
                                   const std::string& gf);
  FinCategoryBuilder& provenance(Provenance p);

  CatPtr build(const BudgetMeter* meter = nullptr) const;

 private:
  std::string name_;
  std::vector<std::string> objects_;
  std::vector<std::array<std::string, 3>> morphisms_;
  std::vector<std::pair<std::string, std::string>> identities_;
  std::vector<std::array<std::string, 3>> comps_;
  std::optional<Provenance> provenance_;
};

// Index-based construction for large tables. Ids appear once each; all
// wiring is by index into the orders given here, and everything is re-sorted
// canonically, so input order does not matter. Use this instead of the
// builder when the composition table is big: the builder stores three id
// strings per entry, which dwarfs the table itself.
struct AssembleInput {
  std::string name;
  std::vector<std::string> objects;
  std::vector<MorRec> morphisms;                   // src/tgt index into objects
  std::vector<std::uint32_t> identity;             // per object, index into morphisms
  std::vector<std::array<std::uint32_t, 3>> comp;  // (g, f, gf) into morphisms
  std::optional<Provenance> prov;
};

CatPtr assemble_category(AssembleInput in, const BudgetMeter* meter = nullptr);

// One violated law with a concrete witness (ids of the offending cells).
struct Violation {
  std::string law;
  std::vector<std::string> witness;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  void add(std::string law, std::vector<std::string> witness) {
    ok = false;
    violations.push_back({std::move(law), std::move(witness)});
  }
};

// Exhaustive scan: identity shape, totality and closure of composition,
// unit laws, associativity on every composable triple.
ValidationReport validate_category(const FinCategory& c);

struct FinFunctor {
  CatPtr source;
  CatPtr target;
  std::vector<std::uint32_t> omap;  // per source object index
  std::vector<std::uint32_t> mmap;  // per source morphism index

  std::uint32_t on_obj(std::uint32_t o) const { return omap[o]; }
  std::uint32_t on_mor(std::uint32_t m) const { return mmap[m]; }
};

FinFunctor identity_functor(const CatPtr& c);
FinFunctor constant_functor(const CatPtr& source, const CatPtr& target,
                            std::uint32_t target_obj);
// g after f, defined when f.target and g.source agree structurally
FinFunctor compose_functors(const FinFunctor& g, const FinFunctor& f);

// Build from string maps; unresolved or missing entries are input errors.
FinFunctor make_functor(const CatPtr& source, const CatPtr& target,
                        const std::unordered_map<std::string, std::string>& on_objects,
                        const std::unordered_map<std::string, std::string>& on_morphisms);

// Functoriality scan: typing of images, identities, all composable pairs.
ValidationReport validate_functor(const FinFunctor& f);

bool functor_equal(const FinFunctor& a, const FinFunctor& b);
bool functor_is_iso(const FinFunctor& f);  // bijective on objects and morphisms

struct NatTransformation {
  FinFunctor source;  // F
  FinFunctor target;  // G, parallel to F
  std::vector<std::uint32_t> component;  // per source-category object index
};

NatTransformation identity_nat(const FinFunctor& f);
// vertical composite: beta after alpha
NatTransformation vcompose_nat(const NatTransformation& beta, const NatTransformation& alpha);
// horizontal composite: beta * alpha for alpha: F=>G (A->B), beta: H=>K (B->C)
NatTransformation hcompose_nat(const NatTransformation& beta, const NatTransformation& alpha);

NatTransformation make_nat(const FinFunctor& f, const FinFunctor& g,
                           const std::unordered_map<std::string, std::string>& components);

// Typing problems (wrong src/tgt, missing component, non-parallel functors)
// are input errors; the report covers naturality squares.
ValidationReport validate_nat_trans(const NatTransformation& n);

bool nat_equal(const NatTransformation& a, const NatTransformation& b);

// Finite product with projections; the empty product is the terminal
// category. Object and morphism ids are tuple encodings of the factor ids.
struct ProductResult {
  CatPtr cat;
  std::vector<FinFunctor> projections;
};

ProductResult product_category(const std::vector<CatPtr>& factors,
                               const Budget& budget = Budget{});

// Pairing into a product: for functors f_i : X -> C_i and the product of the
// C_i (with its projections), the unique functor X -> product whose
// composites with the projections are the f_i.
FinFunctor tuple_functor(const std::vector<FinFunctor>& parts, const ProductResult& prod);

// Full subcategory on the given ambient objects (duplicates ignored); object
// and morphism ids are kept, so the inclusion reads as the identity on ids.
struct SubcategoryResult {
  CatPtr cat;
  FinFunctor inclusion;  // cat -> ambient
};

SubcategoryResult full_subcategory(const CatPtr& c,
                                   const std::vector<std::uint32_t>& objs,
                                   const std::string& name,
                                   std::optional<Provenance> prov = {});

// Input digests for provenance blocks.
std::string functor_digest_hex(const FinFunctor& f);
std::string nat_digest_hex(const NatTransformation& n);

}  // namespace pielim
