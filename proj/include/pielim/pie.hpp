#pragma once

// PIE building blocks: inserter, equifier, iso-inserter, their joint
// variants, the pseudopullback, and the reductions between pseudopullback
// and isomorpher.
//
// Constructed categories use canonical ids encoding the defining tuples
// ("ins(K=a;phi=m3)", "ppb(A=a;B=b;th=t)"), so outputs are byte-stable. Every
// output carries a provenance block with the input digests.

#include <utility>
#include <vector>

#include "pielim/compare.hpp"
#include "pielim/fincat.hpp"

namespace pielim {

// Inserter of a parallel pair F, G : K -> L. Objects are pairs
// (x, phi: F(x) -> G(x)); a morphism (x,phi) -> (y,chi) is an underlying
// K-morphism f with G(f).phi = chi.F(f). The forgetful functor drops phi.
struct InserterResult {
  CatPtr cat;
  FinFunctor forgetful;                  // cat -> K, faithful
  std::vector<std::uint32_t> structure;  // per object: phi, a morphism of L
};

InserterResult inserter(const FinFunctor& f, const FinFunctor& g,
                        const Budget& budget = Budget{});

// Full subcategory of inserter(p, q) on the objects with invertible
// structure morphism; ids are shared with the inserter's.
InserterResult iso_inserter(const FinFunctor& p, const FinFunctor& q,
                            const Budget& budget = Budget{});

// Joint inserter of a family of parallel pairs F_i, G_i : K -> L_i. Objects
// carry one structure morphism per pair. The empty family returns K itself
// with the identity forgetful functor. A one-pair family delegates to
// inserter. Packing the targets into a product and taking a single inserter
// gives an isomorphic category (checked in tests, not here).
struct JointInserterResult {
  CatPtr cat;
  FinFunctor forgetful;
  std::vector<std::vector<std::uint32_t>> structure;  // per object, per pair
};

JointInserterResult joint_inserter(const CatPtr& k,
                                   const std::vector<std::pair<FinFunctor, FinFunctor>>& pairs,
                                   const Budget& budget = Budget{});

// Equifier of parallel natural transformations phi, psi : F => G — the full
// subcategory of the common source on the objects where the components
// agree. Kept as a view; materialize() builds the actual category.
struct SubcategoryView {
  CatPtr ambient;
  std::vector<std::uint32_t> kept;  // sorted ambient object indices
  std::optional<Provenance> prov;

  SubcategoryResult materialize(const std::string& name) const {
    return full_subcategory(ambient, kept, name, prov);
  }
};

SubcategoryView equifier(const NatTransformation& phi, const NatTransformation& psi);

// Intersection of the individual equifiers; the empty family keeps all of k.
SubcategoryView joint_equifier(
    const CatPtr& k,
    const std::vector<std::pair<NatTransformation, NatTransformation>>& pairs);

// Pseudopullback of Theta_A : A -> C, Theta_B : B -> C. Objects are triples
// (a, b, th) with th : Theta_A(a) -> Theta_B(b) invertible; morphisms are
// pairs (f, g) making the square with the glue morphisms commute.
struct PseudopullbackResult {
  CatPtr cat;
  FinFunctor to_left;   // projection to A
  FinFunctor to_right;  // projection to B
  std::vector<std::array<std::uint32_t, 3>> obj_data;  // (a, b, th)
  std::vector<std::array<std::uint32_t, 4>> mor_data;  // (f, g, th_src, th_tgt)
};

PseudopullbackResult pseudopullback_direct(const FinFunctor& theta_a,
                                           const FinFunctor& theta_b,
                                           const Budget& budget = Budget{});

// The product-inserter-equifier route: inserter of (Theta_A, Theta_B) against
// the swapped pair over C x C gives quadruples (a, b, th', th''); a joint
// equifier against the identity forces th', th'' to be mutually inverse.
// The witness is the canonical iso direct -> pie, (a,b,th) -> (a,b,th,th^-1).
struct PseudopullbackViaPie {
  CatPtr cat;
  CatPtr direct;
  FinFunctor witness;  // direct -> cat
};

PseudopullbackViaPie pseudopullback_via_pie(const FinFunctor& theta_a,
                                            const FinFunctor& theta_b,
                                            const Budget& budget = Budget{});

// The two reductions between pseudopullback and isomorpher.
//   ToIsomorpher: x, y are Theta_A : A -> C, Theta_B : B -> C; builds the
//     isomorpher over A x B and compares with the direct pseudopullback
//     (strict isomorphism).
//   ToPullback: x, y are P, Q : H -> G; builds the pseudopullback over
//     H x G via (Id,P), (Id,Q) and compares with the isomorpher of (P, Q)
//     (category equivalence).
enum class ReductionDirection { ToIsomorpher, ToPullback };

struct ReductionReport {
  CatPtr constructed;        // the rebuilt category in the chosen direction
  CatPtr reference;          // the other construction on the same data
  CompareResult comparison;  // iso or equivalence verdict with witness
};

ReductionReport pullback_isomorpher_reduction(ReductionDirection dir, const FinFunctor& x,
                                              const FinFunctor& y,
                                              const Budget& budget = Budget{});

}  // namespace pielim
