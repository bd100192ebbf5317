#include <doctest.h>

#include "pielim/compare.hpp"
#include "pielim/corpus.hpp"
#include "pielim/setdiag.hpp"

using namespace pielim;

namespace {

CatPtr renamed_arrow() {
  FinCategoryBuilder b("arrow-renamed");
  b.object("p").object("q");
  b.morphism("ip", "p", "p").morphism("iq", "q", "q").morphism("m", "p", "q");
  b.identity("p", "ip").identity("q", "iq");
  b.compose_rule("ip", "ip", "ip").compose_rule("iq", "iq", "iq");
  b.compose_rule("m", "ip", "m").compose_rule("iq", "m", "m");
  return b.build();
}

CatPtr one_object_monoid(const char* name, bool idempotent) {
  FinCategoryBuilder b(name);
  b.object("*");
  b.morphism("id", "*", "*").morphism("s", "*", "*");
  b.identity("*", "id");
  b.compose_rule("id", "id", "id").compose_rule("id", "s", "s").compose_rule("s", "id", "s");
  b.compose_rule("s", "s", idempotent ? "s" : "id");
  return b.build();
}

CatPtr indiscrete(const std::vector<std::string>& names) {
  FinCategoryBuilder b("indiscrete");
  auto u = [](const std::string& x, const std::string& y) { return "u(" + x + "," + y + ")"; };
  for (const auto& x : names) b.object(x);
  for (const auto& x : names)
    for (const auto& y : names) b.morphism(u(x, y), x, y);
  for (const auto& x : names) b.identity(x, u(x, x));
  for (const auto& x : names)
    for (const auto& y : names)
      for (const auto& z : names) b.compose_rule(u(y, z), u(x, y), u(x, z));
  return b.build();
}

CompareResult iso(const CatPtr& a, const CatPtr& b) {
  BudgetMeter meter{Budget{}};
  return compare_categories(a, b, CompareMode::Isomorphism, meter);
}

CompareResult equiv(const CatPtr& a, const CatPtr& b) {
  BudgetMeter meter{Budget{}};
  return compare_categories(a, b, CompareMode::Equivalence, meter);
}

}  // namespace

TEST_CASE("every corpus category is isomorphic to itself") {
  for (const auto& [name, cat] : standard_corpus()) {
    CAPTURE(name);
    auto r = iso(cat, cat);
    CHECK(r.match);
    REQUIRE(r.witness.has_value());
    CHECK(validate_functor(*r.witness).ok);
  }
}

TEST_CASE("isomorphism is found across renaming") {
  auto r = iso(arrow_category(), renamed_arrow());
  REQUIRE(r.match);
  const FinFunctor& w = *r.witness;
  CHECK(w.target->obj_id(w.omap[w.source->object_index("0")]) == "p");
  CHECK(w.target->mor_id(w.mmap[w.source->morphism_index("le(0,1)")]) == "m");
  REQUIRE(r.witness_inverse.has_value());
  CHECK(functor_equal(compose_functors(*r.witness_inverse, w),
                      identity_functor(arrow_category())));
}

TEST_CASE("size mismatches are rejected immediately") {
  auto r = iso(terminal_category(), arrow_category());
  CHECK(!r.match);
  CHECK(r.detail == "object counts differ");
  CHECK(r.nodes == 0);
}

TEST_CASE("equal counts do not fool the search") {
  SUBCASE("parallel pair vs walking iso") {
    // both have 2 objects and 4 morphisms, but one is a groupoid
    auto r = iso(parallel_pair_category(), walking_iso_category());
    CHECK(!r.match);
  }
  SUBCASE("two-element group vs idempotent monoid") {
    auto r = iso(one_object_monoid("c2", false), one_object_monoid("e2", true));
    CHECK(!r.match);
  }
}

TEST_CASE("non-identity idempotents are picked up as generators") {
  // regression: a generating set defined as "morphisms with no factorization
  // into non-identities" would miss an idempotent e = e.e entirely
  auto e1 = one_object_monoid("e", true);
  FinCategoryBuilder b("e-renamed");
  b.object("o");
  b.morphism("1", "o", "o").morphism("t", "o", "o");
  b.identity("o", "1");
  b.compose_rule("1", "1", "1").compose_rule("1", "t", "t").compose_rule("t", "1", "t");
  b.compose_rule("t", "t", "t");
  auto e2 = b.build();
  auto r = iso(e1, e2);
  REQUIRE(r.match);
  CHECK(r.witness->target->mor_id(r.witness->mmap[e1->morphism_index("s")]) == "t");
}

TEST_CASE("skeletons") {
  SUBCASE("walking iso collapses to the point") {
    auto sk = skeleton_of(walking_iso_category());
    CHECK(sk.cat->n_objects() == 1);
    CHECK(sk.cat->n_morphisms() == 1);
    auto wi = walking_iso_category();
    CHECK(sk.rep[wi->object_index("b")] == wi->object_index("a"));
    CHECK(wi->mor_id(sk.to_rep[wi->object_index("b")]) == "v");
  }
  SUBCASE("a poset is already skeletal") {
    auto ch = chain_poset(3);
    auto sk = skeleton_of(ch);
    CHECK(sk.cat->structurally_equal(*ch));
  }
}

TEST_CASE("equivalence without isomorphism") {
  auto wi = walking_iso_category();
  auto pt = terminal_category();
  CHECK(!iso(wi, pt).match);

  auto r = equiv(wi, pt);
  REQUIRE(r.match);
  CHECK(validate_functor(*r.witness).ok);
  CHECK(is_fully_faithful(*r.witness));

  auto ind = indiscrete({"x", "y", "z"});
  REQUIRE(validate_category(*ind).ok);
  CHECK(equiv(ind, pt).match);
  CHECK(equiv(ind, wi).match);
  CHECK(!iso(ind, wi).match);
  CHECK(equiv(pt, ind).match);
}

TEST_CASE("equivalence distinguishes genuinely different categories") {
  auto r = equiv(arrow_category(), walking_iso_category());
  CHECK(!r.match);
  CHECK(r.detail.find("skeletons are not isomorphic") == 0);
  CHECK(!equiv(parallel_pair_category(), arrow_category()).match);
}

TEST_CASE("search honors the candidate budget") {
  auto a = indiscrete({"x", "y", "z"});
  auto b = indiscrete({"x2", "y2", "z2"});
  REQUIRE(iso(a, b).match);  // sanity with the default budget

  Budget tiny;
  tiny.candidates = 1;
  BudgetMeter meter{tiny};
  CHECK_THROWS_AS(compare_categories(a, b, CompareMode::Isomorphism, meter), resource_error);
}

TEST_CASE("node counts are reported") {
  auto r = iso(grid_poset_2x2(), grid_poset_2x2());
  CHECK(r.match);
  CHECK(r.nodes == 0);  // structural fast path

  auto r2 = iso(arrow_category(), renamed_arrow());
  CHECK(r2.match);
  CHECK(r2.nodes > 0);
}
