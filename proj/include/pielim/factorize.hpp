#pragma once

// Filtered presentations over finite directed posets, and the chain walks
// that factorize a morphism from a small object through a stage compatible
// with an equifier or inserter condition. The transfinite chain of the
// source arguments collapses here: a finite directed poset has a maximum
// whose leg realizes the apex, so certificates name a stage instead of
// building a new colimit object, and every walk terminates there at the
// latest. Also: the canonical-diagram analysis over an inserter
// (filteredness of the pair diagram, cofinality of its projection to the
// carrier diagram) and the membership criterion by exhaustive
// middle-object search.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pielim/fincat.hpp"
#include "pielim/pie.hpp"
#include "pielim/setdiag.hpp"

namespace pielim {

// apex presented as the colimit of the stages over a directed poset.
// legs[x] : stages(x) -> apex; the cocone commutes and the maximum-stage
// leg is invertible — that iso is what makes the finite collapse honest.
struct FilteredPresentation {
  FinFunctor stages;                // index poset -> K
  std::uint32_t apex = 0;           // object of K
  std::vector<std::uint32_t> legs;  // per index object, morphism of K
};

FilteredPresentation make_presentation(FinFunctor stages, const std::string& apex,
                                       const std::vector<std::string>& legs);

// Index nonempty, thin, antisymmetric and directed; stages a functor; legs
// from each stage to the apex; cocone commuting; maximum leg invertible.
ValidationReport validate_presentation(const FilteredPresentation& p);

// Object index of the maximum element of the index poset.
std::uint32_t presentation_maximum(const FilteredPresentation& p);

// A factorization input = leg . through at a named stage, plus the index
// chain the walk visited (stage last). psi is the structure morphism of
// the inserter walk; the equifier walk leaves it empty.
struct FactorizationCertificate {
  std::uint32_t stage = 0;           // index object
  std::uint32_t through = 0;         // morphism of K into stages(stage)
  std::uint32_t leg = 0;             // == legs[stage]
  std::optional<std::uint32_t> psi;  // morphism of L (inserter case)
  std::vector<std::uint32_t> chain;  // visited index objects
};

// Walk for phi, psi : F => G with F, G : K -> L and an apex inside the
// equifier (phi and psi agree at it). Starting from the least stage that
// factorizes f, advance to the least next stage where both transported
// transformations push to the same composite, and stop at the first stage
// where they agree on the nose; the maximum forces agreement.
FactorizationCertificate equifier_factorize(std::uint32_t f, const NatTransformation& phi,
                                            const NatTransformation& psi,
                                            const FilteredPresentation& p);

bool verify_equifier_certificate(const FactorizationCertificate& c, std::uint32_t f,
                                 const NatTransformation& phi, const NatTransformation& psi,
                                 const FilteredPresentation& p);

// Input data of the pentagon walk: F, G : K -> L, a structure morphism on
// the apex, morphisms s : S -> T and t : T -> apex in K, and
// sigma : F(S) -> G(T) in L with structure . F(t . s) = G(t) . sigma.
struct PentagonInput {
  FinFunctor left, right;       // F, G : K -> L
  std::uint32_t structure = 0;  // F(apex) -> G(apex)
  std::uint32_t into = 0;       // s : S -> T
  std::uint32_t to_apex = 0;    // t : T -> apex
  std::uint32_t sigma = 0;      // F(S) -> G(T)
};

// Walk for the pentagon data: starting from the least stage factorizing t,
// stop at the first stage carrying a structure morphism psi that closes
// both the transported pentagon and the square against the leg; otherwise
// advance to the least stage the cross-stage lift reaches. At the maximum
// psi induced from the apex structure morphism always closes both.
FactorizationCertificate inserter_factorize(const PentagonInput& in,
                                            const FilteredPresentation& p);

bool verify_inserter_certificate(const FactorizationCertificate& c, const PentagonInput& in,
                                 const FilteredPresentation& p);

// Canonical diagrams over an inserter object: over_inserter indexes the
// morphisms into e_obj from objects with small carrier, over_base the
// morphisms into its carrier from the small objects themselves, and
// between is the carrier projection. Reports filteredness of the first
// and cofinality of the projection.
struct CanonicalAnalysis {
  CanonicalDiagram over_inserter;
  CanonicalDiagram over_base;
  FinFunctor between;
  FilteredCheck filtered;
  CofinalCheck cofinal;
};

CanonicalAnalysis inserter_canonical_analysis(const InserterResult& ins,
                                              const PresentationContext& base,
                                              const std::string& e_obj,
                                              const Budget& budget = Budget{});

// Does every morphism from a small object into e_obj factorize through a
// member of s_sub? The witness on failure is the first morphism in
// canonical order with no middle object.
struct MembershipCheck {
  bool member = false;
  std::optional<std::string> witness;
};

MembershipCheck verify_membership_criterion(const PresentationContext& ctx,
                                            const std::vector<std::string>& s_sub,
                                            const std::string& e_obj);

}  // namespace pielim
