#pragma once

// Diagram categories at desk scale: functor categories Fun(C,K) built both
// by direct enumeration and through the product/inserter/equifier pipeline,
// and k-linear categories presented by acyclic quivers with relations
// together with their finite matrix representation categories (again direct
// and via the pipeline).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pielim/engine.hpp"
#include "pielim/fincat.hpp"

namespace pielim {

// ---------------------------------------------------------------------------
// Functor categories

// Objects are the functors C -> K, morphisms the natural transformations,
// composed componentwise.
struct FunCategoryResult {
  CatPtr cat;
  std::vector<FinFunctor> functors;  // per object, in cat object order
  // per morphism: component K-morphism per C-object, in C object order
  std::vector<std::vector<std::uint32_t>> components;
};

FunCategoryResult fun_category_direct(const CatPtr& c, const CatPtr& k,
                                      const Budget& budget = Budget{});

// Number of functors C -> K; nothing is materialized and only the candidate
// budget applies.
std::uint64_t count_functors(const CatPtr& c, const CatPtr& k,
                             const Budget& budget = Budget{});

// The pipeline spec behind fun_category_via_pie: one K-factor per C-object,
// one slot per C-morphism, and the two coherence families ("composition",
// "identity"). Exposed so tests can drop a family and watch the output grow.
TupleSpec fun_category_pie_spec(const CatPtr& c, const CatPtr& k);

struct FunCategoryPie {
  TupleResult pie;           // the category built through the pipeline
  FunCategoryResult direct;  // reference build
  FinFunctor witness;        // iso direct.cat -> pie.cat, F |-> ((Fc)_c, (Fm)_m)
};

FunCategoryPie fun_category_via_pie(const CatPtr& c, const CatPtr& k,
                                    const Budget& budget = Budget{});

// ---------------------------------------------------------------------------
// Quivers and k-linear presentations

struct QuiverArrow {
  std::string id;
  std::uint32_t src = 0;
  std::uint32_t tgt = 0;
};

struct Quiver {
  std::vector<std::string> vertices;  // sorted
  std::vector<QuiverArrow> arrows;    // sorted by id
  bool acyclic = true;

  std::uint32_t vertex_index(const std::string& v) const;
  std::uint32_t arrow_index(const std::string& a) const;
};

// Arrows given as (id, src vertex, tgt vertex). Names are resolved, both
// lists are put in canonical sorted order, and cycles are flagged.
Quiver make_quiver(std::vector<std::string> vertices,
                   const std::vector<std::array<std::string, 3>>& arrows);

// Arrow indices in application order (first arrow applied first); the empty
// path is the identity basis element at a vertex.
using Path = std::vector<std::uint32_t>;

std::string render_path(const Quiver& q, std::uint32_t src, const Path& path);

// Formal k-linear combination of parallel paths, set to zero in a quotient.
struct Relation {
  std::uint32_t src = 0;
  std::uint32_t tgt = 0;
  std::vector<std::pair<std::int64_t, Path>> terms;
};

std::string render_relation(const Quiver& q, const Relation& r);

// Coefficients: the integers (modular = false) or the integers mod a prime.
struct RingSpec {
  bool modular = false;
  std::uint32_t p = 0;
};

// A k-linear category presented by an acyclic quiver. Hom-modules are free
// k-modules on the path bases, composition is concatenation extended
// bilinearly, and `ideal` holds the reduced row set the relations generate
// inside each hom-pair (empty for a free category). Normal forms come from
// Gaussian elimination over a prime field and Hermite-style reduction over
// the integers, against the fixed length-then-lexicographic path order.
struct LinearCategory {
  RingSpec ring;
  Quiver quiver;
  std::vector<Relation> relations;

  // basis[a][b] = all paths a -> b, sorted by length then lexicographically
  std::vector<std::vector<std::vector<Path>>> basis;
  // ideal[a][b] = reduced rows, each a coefficient vector over basis[a][b]
  std::vector<std::vector<std::vector<std::vector<std::int64_t>>>> ideal;

  std::uint32_t path_index(std::uint32_t a, std::uint32_t b, const Path& p) const;
  // canonical normal form of a coefficient vector over basis[a][b]
  std::vector<std::int64_t> reduce(std::uint32_t a, std::uint32_t b,
                                   std::vector<std::int64_t> v) const;
  // free rank of the (quotient) hom-module
  std::uint32_t hom_rank(std::uint32_t a, std::uint32_t b) const;
};

LinearCategory free_path_category(const Quiver& q, const RingSpec& ring,
                                  const Budget& budget = Budget{});

// Quotient by the two-sided ideal the relations generate. Composition is
// checked to be well defined on normal forms over all composable basis
// pairs; chaining quotients accumulates relations.
LinearCategory quotient_by_relations(const LinearCategory& b, std::vector<Relation> rels,
                                     const Budget& budget = Budget{});

// Truncated complex presentation on the window [n0, n1]: vertices n0..n1,
// arrows d_k : k -> k+1, and the composite relations d_{k+1} d_k.
std::pair<Quiver, std::vector<Relation>> complex_presentation(int n0, int n1);

// ---------------------------------------------------------------------------
// Matrix representations

// Skeleton of F_p-vector spaces of dimension at most d: objects 0..d, a
// morphism a -> b is a b x a matrix, composition is matrix product. Morphism
// ids spell the matrix out row-major ("m2x1(1,0)").
struct MatrixCategory {
  std::uint32_t p = 2;
  std::uint32_t d = 2;
  CatPtr cat;
  std::vector<std::uint32_t> dim;                              // per object
  std::vector<std::pair<std::uint32_t, std::uint32_t>> shape;  // per morphism (rows, cols)
  std::vector<std::vector<std::uint32_t>> entries;             // row-major, values in [0, p)
  std::vector<std::uint32_t> obj_of_dim;                       // dimension -> object index
};

MatrixCategory matrix_category(std::uint32_t p, std::uint32_t d,
                               const Budget& budget = Budget{});

// A dimension per vertex plus a fitting matrix per arrow. Membership in a
// representation category additionally requires every relation to evaluate
// to the zero matrix.
struct Representation {
  std::vector<std::uint32_t> dims;  // per vertex: a dimension, not an object index
  std::vector<std::uint32_t> mats;  // per arrow: morphism index in the matrix category
};

// Value of a relation on an assignment, as a row-major matrix over F_p of
// shape dims[r.tgt] x dims[r.src].
std::vector<std::uint32_t> evaluate_relation(const MatrixCategory& m, const Representation& rep,
                                             const Relation& r);

struct RepCategoryResult {
  CatPtr cat;
  std::vector<Representation> objects;  // per object, in cat order
  // per morphism: intertwiner components, a matrix-category morphism per vertex
  std::vector<std::vector<std::uint32_t>> components;
};

RepCategoryResult rep_category_direct(const LinearCategory& a, const MatrixCategory& m,
                                      const Budget& budget = Budget{});

std::uint64_t count_representations(const LinearCategory& a, const MatrixCategory& m,
                                    const Budget& budget = Budget{});

// Pipeline spec: one matrix-category factor per vertex, one slot per arrow,
// one equifier family per relation. Exposed for the liveness tests.
TupleSpec rep_category_pie_spec(const LinearCategory& a, const MatrixCategory& m);

struct RepCategoryPie {
  TupleResult pie;
  RepCategoryResult direct;
  FinFunctor witness;  // iso direct.cat -> pie.cat
};

RepCategoryPie rep_category_via_pie(const LinearCategory& a, const MatrixCategory& m,
                                    const Budget& budget = Budget{});

// Digest of a presentation (ring, quiver, relations) for provenance blocks.
std::string linear_digest_hex(const LinearCategory& a);

}  // namespace pielim
