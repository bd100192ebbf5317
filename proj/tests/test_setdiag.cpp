#include <doctest.h>

#include "oracles.hpp"
#include "pielim/corpus.hpp"
#include "pielim/setdiag.hpp"

using namespace pielim;

static SetDiagram pp_diagram() {
  // f collapses, g swaps on a two-element set
  auto pp = parallel_pair_category();
  return make_set_diagram(
      pp,
      {{"a", {"x", "y"}}, {"b", {"p", "q"}}},
      {{"ida", {{"x", "x"}, {"y", "y"}}},
       {"idb", {{"p", "p"}, {"q", "q"}}},
       {"f", {{"x", "p"}, {"y", "p"}}},
       {"g", {{"x", "p"}, {"y", "q"}}}});
}

TEST_CASE("set diagram validation") {
  auto d = pp_diagram();
  CHECK(validate_set_diagram(d).ok);

  SUBCASE("identity must be the identity map") {
    auto bad = d;
    std::swap(bad.maps[d.shape->morphism_index("ida")][0],
              bad.maps[d.shape->morphism_index("ida")][1]);
    auto rep = validate_set_diagram(bad);
    CHECK(!rep.ok);
    CHECK(rep.violations.front().law == "diagram-identity");
  }

  SUBCASE("composition must be preserved") {
    auto chain = chain_poset(3);
    auto d3 = make_set_diagram(
        chain,
        {{"0", {"e"}}, {"1", {"e1", "e2"}}, {"2", {"z"}}},
        {{"id0", {{"e", "e"}}},
         {"id1", {{"e1", "e1"}, {"e2", "e2"}}},
         {"id2", {{"z", "z"}}},
         {"le(0,1)", {{"e", "e1"}}},
         {"le(1,2)", {{"e1", "z"}, {"e2", "z"}}},
         {"le(0,2)", {{"e", "z"}}}});
    CHECK(validate_set_diagram(d3).ok);
  }

  SUBCASE("unknown elements are input errors") {
    auto pp = parallel_pair_category();
    std::vector<std::pair<std::string, std::vector<std::string>>> sets = {
        {"a", {"x"}}, {"b", {"p"}}};
    std::vector<std::pair<std::string,
                          std::vector<std::pair<std::string, std::string>>>>
        maps = {{"ida", {{"x", "x"}}},
                {"idb", {{"p", "p"}}},
                {"f", {{"x", "nope"}}},
                {"g", {{"x", "p"}}}};
    CHECK_THROWS_AS(make_set_diagram(pp, sets, maps), input_error);
  }
}

TEST_CASE("colimit of the coequalizer diagram") {
  auto d = pp_diagram();
  auto coc = colimit_set_diagram(d);
  // x ~ p (via f and g on x), y ~ p (via f), y ~ q (via g): everything merges
  CHECK(coc.apex.size() == 1);

  // oracle agreement
  auto part = oracles::colimit_partition(d);
  CHECK(part.size() == coc.apex.size());
}

TEST_CASE("colimit legs form a cocone and class labels are least tags") {
  auto chain = chain_poset(3);
  auto d = make_set_diagram(
      chain,
      {{"0", {"a", "b"}}, {"1", {"m"}}, {"2", {"u", "v"}}},
      {{"id0", {{"a", "a"}, {"b", "b"}}},
       {"id1", {{"m", "m"}}},
       {"id2", {{"u", "u"}, {"v", "v"}}},
       {"le(0,1)", {{"a", "m"}, {"b", "m"}}},
       {"le(1,2)", {{"m", "u"}}},
       {"le(0,2)", {{"a", "u"}, {"b", "u"}}}});
  REQUIRE(validate_set_diagram(d).ok);
  auto coc = colimit_set_diagram(d);
  // classes: {0.a, 0.b, 1.m, 2.u} and {2.v}
  REQUIRE(coc.apex.size() == 2);
  CHECK(coc.apex[0] == "[0.a]");
  CHECK(coc.apex[1] == "[2.v]");

  // cocone property: leg(tgt) . map = leg(src)
  const FinCategory& c = *d.shape;
  for (std::uint32_t m = 0; m < c.n_morphisms(); ++m)
    for (std::uint32_t i = 0; i < d.maps[m].size(); ++i)
      CHECK(coc.legs[c.src(m)][i] == coc.legs[c.tgt(m)][d.maps[m][i]]);

  // oracle partition matches class count and membership
  auto part = oracles::colimit_partition(d);
  REQUIRE(part.size() == 2);
  std::set<std::string> big = {"0.a", "0.b", "1.m", "2.u"};
  CHECK((part[0] == big || part[1] == big));
}

TEST_CASE("filteredness verdicts with witnesses") {
  CHECK(is_filtered(*chain_poset(3)).filtered);
  CHECK(is_filtered(*grid_poset_2x2()).filtered);
  CHECK(is_filtered(*terminal_category()).filtered);
  CHECK(is_filtered(*walking_iso_category()).filtered);

  SUBCASE("discrete pair has no cospan") {
    auto chk = is_filtered(*discrete_category(2));
    CHECK(!chk.filtered);
    REQUIRE(chk.witness.has_value());
    CHECK(chk.witness->kind == "no-cospan");
    CHECK(chk.witness->cells == std::vector<std::string>{"d0", "d1"});
  }

  SUBCASE("parallel pair has no coequalizing morphism") {
    auto chk = is_filtered(*parallel_pair_category());
    CHECK(!chk.filtered);
    REQUIRE(chk.witness.has_value());
    CHECK(chk.witness->kind == "no-coequalizer");
    CHECK(chk.witness->cells == std::vector<std::string>{"f", "g"});
  }

  SUBCASE("empty category is rejected") {
    auto e = FinCategoryBuilder("empty").build();
    auto chk = is_filtered(*e);
    CHECK(!chk.filtered);
    REQUIRE(chk.witness.has_value());
    CHECK(chk.witness->kind == "empty");
  }

  SUBCASE("pushout shape lacks a cospan for the two feet") {
    FinCategoryBuilder b("span");
    b.object("a").object("b").object("c");
    b.morphism("ida", "a", "a").morphism("idb", "b", "b").morphism("idc", "c", "c");
    b.morphism("l", "a", "b").morphism("r", "a", "c");
    b.identity("a", "ida").identity("b", "idb").identity("c", "idc");
    b.compose_rule("ida", "ida", "ida").compose_rule("idb", "idb", "idb");
    b.compose_rule("idc", "idc", "idc");
    b.compose_rule("l", "ida", "l").compose_rule("idb", "l", "l");
    b.compose_rule("r", "ida", "r").compose_rule("idc", "r", "r");
    auto chk = is_filtered(*b.build());
    CHECK(!chk.filtered);
    CHECK(chk.witness->kind == "no-cospan");
    CHECK(chk.witness->cells == std::vector<std::string>{"b", "c"});
  }
}

TEST_CASE("canonical diagram over the chain poset") {
  auto chain = chain_poset(3);
  auto ctx = full_context(chain);
  auto cd = canonical_diagram(ctx, "2");

  // objects: the three morphisms into 2
  CHECK(cd.diagram->n_objects() == 3);
  // slice over the top of a chain is again a 3-chain
  CHECK(cd.diagram->n_morphisms() == 6);
  CHECK(validate_category(*cd.diagram).ok);
  CHECK(validate_functor(cd.to_ambient).ok);
  CHECK(is_filtered(*cd.diagram).filtered);

  SUBCASE("restricting the small objects shrinks the diagram") {
    auto ctx2 = make_context(chain, {"1", "2"});
    auto cd2 = canonical_diagram(ctx2, "2");
    CHECK(cd2.diagram->n_objects() == 2);
    CHECK(validate_functor(cd2.to_ambient).ok);
  }
}

TEST_CASE("canonical diagram over finsets") {
  auto s1 = finset_skeleton(1);
  auto ctx = full_context(s1);
  auto cd = canonical_diagram(ctx, "1");
  // morphisms into 1: f01, f11_0 -> two objects
  CHECK(cd.diagram->n_objects() == 2);
  CHECK(validate_category(*cd.diagram).ok);
  CHECK(validate_functor(cd.to_ambient).ok);
}

TEST_CASE("cofinality of poset inclusions") {
  auto chain = chain_poset(3);
  auto one = terminal_category();

  SUBCASE("top element is cofinal") {
    auto top = constant_functor(one, chain, chain->object_index("2"));
    auto chk = is_cofinal(top);
    CHECK(chk.cofinal);
    CHECK(cofinal_condition_a(top));
  }

  SUBCASE("bottom element is not") {
    auto bot = constant_functor(one, chain, chain->object_index("0"));
    auto chk = is_cofinal(bot);
    CHECK(!chk.cofinal);
    REQUIRE(chk.witness.has_value());
    CHECK(chk.witness->reason == "empty-comma");
    CHECK(!cofinal_condition_a(bot));
  }

  SUBCASE("discrete image in a cospan-free poset is disconnected") {
    // delta : discrete(2) -> (b <- a -> c)-op ... use the two feet of a span
    FinCategoryBuilder b("vee");
    b.object("a").object("b").object("c");
    b.morphism("ida", "a", "a").morphism("idb", "b", "b").morphism("idc", "c", "c");
    b.morphism("l", "b", "a").morphism("r", "c", "a");
    b.identity("a", "ida").identity("b", "idb").identity("c", "idc");
    b.compose_rule("ida", "ida", "ida").compose_rule("idb", "idb", "idb");
    b.compose_rule("idc", "idc", "idc");
    b.compose_rule("ida", "l", "l").compose_rule("l", "idb", "l");
    b.compose_rule("ida", "r", "r").compose_rule("r", "idc", "r");
    auto vee = b.build();
    REQUIRE(validate_category(*vee).ok);

    auto d2 = discrete_category(2);
    auto delta = make_functor(d2, vee, {{"d0", "b"}, {"d1", "c"}},
                              {{"id0", "idb"}, {"id1", "idc"}});
    // comma over a: two objects (b via l, c via r), no connecting triangle
    // wait: comma (a down delta) needs morphisms a -> delta(v); none exist,
    // so the failure is emptiness at a? no: hom(a,b) is empty but l: b -> a.
    // Morphisms go b -> a, so hom(a, b) = {} and the comma at a is empty.
    auto chk = is_cofinal(delta);
    CHECK(!chk.cofinal);
  }

  SUBCASE("two incomparable upper elements give a disconnected comma") {
    auto grid = grid_poset_2x2();
    auto d2 = discrete_category(2);
    auto delta = make_functor(d2, grid, {{"d0", "01"}, {"d1", "10"}},
                              {{"id0", "id01"}, {"id1", "id10"}});
    auto chk = is_cofinal(delta);
    CHECK(!chk.cofinal);
    REQUIRE(chk.witness.has_value());
    CHECK(chk.witness->object == "00");
    CHECK(chk.witness->reason == "disconnected-comma");
  }
}

TEST_CASE("cofinal functors preserve colimits on concrete diagrams") {
  auto chain = chain_poset(3);
  auto one = terminal_category();
  auto top = constant_functor(one, chain, chain->object_index("2"));
  REQUIRE(is_cofinal(top).cofinal);

  auto d = make_set_diagram(
      chain,
      {{"0", {"a", "b"}}, {"1", {"m"}}, {"2", {"u", "v"}}},
      {{"id0", {{"a", "a"}, {"b", "b"}}},
       {"id1", {{"m", "m"}}},
       {"id2", {{"u", "u"}, {"v", "v"}}},
       {"le(0,1)", {{"a", "m"}, {"b", "m"}}},
       {"le(1,2)", {{"m", "u"}}},
       {"le(0,2)", {{"a", "u"}, {"b", "u"}}}});
  CHECK(oracles::comparison_is_bijective(d, top));

  // and the non-cofinal bottom inclusion genuinely breaks some diagram
  auto bot = constant_functor(one, chain, chain->object_index("0"));
  CHECK(!oracles::comparison_is_bijective(d, bot));
}

TEST_CASE("condition (a) agrees with cofinality for fully faithful functors into filtered targets") {
  auto chain = chain_poset(3);

  // full subcategory inclusions of upper sets in a chain are fully faithful
  FinCategoryBuilder b("sub12");
  b.object("1").object("2");
  b.morphism("id1", "1", "1").morphism("id2", "2", "2").morphism("le(1,2)", "1", "2");
  b.identity("1", "id1").identity("2", "id2");
  b.compose_rule("id1", "id1", "id1").compose_rule("id2", "id2", "id2");
  b.compose_rule("le(1,2)", "id1", "le(1,2)").compose_rule("id2", "le(1,2)", "le(1,2)");
  auto sub = b.build();
  auto incl = make_functor(sub, chain, {{"1", "1"}, {"2", "2"}},
                           {{"id1", "id1"}, {"id2", "id2"}, {"le(1,2)", "le(1,2)"}});
  REQUIRE(validate_functor(incl).ok);
  REQUIRE(is_fully_faithful(incl));
  REQUIRE(is_filtered(*chain).filtered);

  CHECK(cofinal_condition_a(incl) == is_cofinal(incl).cofinal);
  CHECK(is_cofinal(incl).cofinal);
}
