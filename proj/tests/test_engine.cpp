#include <set>
#include <vector>

#include "doctest.h"
#include "pielim/corpus.hpp"
#include "pielim/engine.hpp"
#include "pielim/pie.hpp"

namespace {

using namespace pielim;

// the same running pair as the pie tests: two functors arrow -> sets2
struct ArrowToSets {
  CatPtr k = arrow_category();
  CatPtr l = finset_skeleton(2);
  FinFunctor f = make_functor(k, l, {{"0", "1"}, {"1", "2"}},
                              {{"id0", "f11_0"}, {"id1", "f22_01"}, {"le(0,1)", "f12_0"}});
  FinFunctor g = make_functor(k, l, {{"0", "2"}, {"1", "2"}},
                              {{"id0", "f22_01"}, {"id1", "f22_01"}, {"le(0,1)", "f22_00"}});
};

// materialize the pipeline the long way: product, then joint inserter over it
JointInserterResult materialized(const TupleSpec& spec) {
  ProductResult prod = product_category(spec.factors);
  std::vector<std::pair<FinFunctor, FinFunctor>> pairs;
  for (const TupleSlot& s : spec.slots)
    pairs.emplace_back(compose_functors(s.p, prod.projections[s.src_factor]),
                       compose_functors(s.q, prod.projections[s.tgt_factor]));
  return joint_inserter(prod.cat, pairs);
}

}  // namespace

TEST_CASE("engine output equals the materialized product-inserter pipeline") {
  ArrowToSets w;
  TupleSpec spec;
  spec.name = "tuple";
  spec.factors = {w.k, w.k};
  spec.slots = {{0, 1, w.f, w.g}, {1, 1, w.g, w.f}};

  TupleResult got = build_tuple_category(spec);
  JointInserterResult want = materialized(spec);

  CHECK(got.cat->n_objects() == want.cat->n_objects());
  CHECK(got.cat->n_morphisms() == want.cat->n_morphisms());
  CHECK(got.cat->structurally_equal(*want.cat));
  CHECK(got.cat->digest_hex() == want.cat->digest_hex());
  CHECK(count_tuple_objects(spec) == got.cat->n_objects());
  CHECK(validate_category(*got.cat).ok);

  // stored carrier data agrees with the forgetful-then-project route
  ProductResult prod = product_category(spec.factors);
  for (std::uint32_t o = 0; o < got.cat->n_objects(); ++o) {
    std::uint32_t packed = want.forgetful.omap[o];  // same object order: ids equal
    CHECK(got.objects[o].carrier[0] == prod.projections[0].omap[packed]);
    CHECK(got.objects[o].carrier[1] == prod.projections[1].omap[packed]);
    CHECK(got.objects[o].structure == want.structure[o]);
  }
  for (std::uint32_t f = 0; f < spec.factors.size(); ++f) {
    FinFunctor pr = tuple_factor_projection(got, f);
    CHECK(validate_functor(pr).ok);
  }
}

TEST_CASE("engine single-slot ids match the plain inserter over the product") {
  ArrowToSets w;
  TupleSpec spec;
  spec.name = "tuple";
  spec.factors = {w.k};
  spec.slots = {{0, 0, w.f, w.g}};

  TupleResult got = build_tuple_category(spec);

  ProductResult prod = product_category(spec.factors);
  InserterResult want = inserter(compose_functors(w.f, prod.projections[0]),
                                 compose_functors(w.g, prod.projections[0]));
  CHECK(got.cat->structurally_equal(*want.cat));
}

TEST_CASE("equifier families cut the engine output to a full subcategory") {
  ArrowToSets w;
  TupleSpec plain;
  plain.name = "tuple";
  plain.factors = {w.k, w.k};
  plain.slots = {{0, 1, w.f, w.g}, {1, 1, w.g, w.f}};
  TupleResult full = build_tuple_category(plain);

  // keep objects whose first structure morphism is constant at element 0
  auto is_kept = [&](const TupleObject& t) {
    return w.l->mor_id(t.structure[0]).ends_with("_0") ||
           w.l->mor_id(t.structure[0]).ends_with("_00");
  };
  TupleSpec cut = plain;
  cut.families = {{"constant-first-slot", is_kept}};
  TupleResult got = build_tuple_category(cut);

  std::vector<std::uint32_t> kept;
  for (std::uint32_t o = 0; o < full.cat->n_objects(); ++o)
    if (is_kept(full.objects[o])) kept.push_back(o);
  SubcategoryResult want = full_subcategory(full.cat, kept, "tuple");

  CHECK(got.cat->n_objects() < full.cat->n_objects());
  CHECK(got.cat->structurally_equal(*want.cat));
  CHECK(count_tuple_objects(cut) == got.cat->n_objects());
}

TEST_CASE("engine with no slots is the filtered product") {
  CatPtr a = arrow_category();
  CatPtr c3 = chain_poset(3);
  TupleSpec spec;
  spec.name = "tuple";
  spec.factors = {a, c3};
  spec.families = {{"skip-top", [&](const TupleObject& t) { return t.carrier[1] != 2; }}};

  TupleResult got = build_tuple_category(spec);

  ProductResult prod = product_category({a, c3});
  std::vector<std::uint32_t> kept;
  for (std::uint32_t o = 0; o < prod.cat->n_objects(); ++o)
    if (prod.projections[1].omap[o] != 2) kept.push_back(o);
  SubcategoryResult want = full_subcategory(prod.cat, kept, "tuple");

  CHECK(got.cat->n_objects() == 4);
  CHECK(got.cat->structurally_equal(*want.cat));
  CHECK(count_tuple_objects(spec) == 4);
}

TEST_CASE("engine degenerate and error cases") {
  TupleSpec empty;
  empty.name = "tuple";
  TupleResult one = build_tuple_category(empty);
  CHECK(one.cat->n_objects() == 1);
  CHECK(one.cat->n_morphisms() == 1);
  CHECK(count_tuple_objects(empty) == 1);

  TupleSpec none = empty;
  none.families = {{"nothing", [](const TupleObject&) { return false; }}};
  CHECK(build_tuple_category(none).cat->n_objects() == 0);
  CHECK(count_tuple_objects(none) == 0);

  ArrowToSets w;
  TupleSpec bad;
  bad.name = "tuple";
  bad.factors = {w.k};
  bad.slots = {{0, 2, w.f, w.g}};
  CHECK_THROWS_AS(build_tuple_category(bad), input_error);

  TupleSpec mismatched;
  mismatched.name = "tuple";
  mismatched.factors = {chain_poset(3)};
  mismatched.slots = {{0, 0, w.f, w.g}};  // functor sources are the arrow, not chain3
  CHECK_THROWS_AS(build_tuple_category(mismatched), input_error);
}

TEST_CASE("engine budget is enforced") {
  ArrowToSets w;
  TupleSpec spec;
  spec.name = "tuple";
  spec.factors = {w.k, w.k};
  spec.slots = {{0, 1, w.f, w.g}, {1, 1, w.g, w.f}};
  Budget tiny;
  tiny.candidates = 3;
  CHECK_THROWS_AS(build_tuple_category(spec, tiny), resource_error);
  CHECK_THROWS_AS(count_tuple_objects(spec, tiny), resource_error);
}
