#include "pielim/limits2.hpp"

#include <algorithm>
#include <map>

#include "enumtools.hpp"
#include "pielim/corpus.hpp"

namespace pielim {

namespace {

using namespace detail;

std::optional<std::uint32_t> table_get(
    const std::vector<std::pair<std::uint64_t, std::uint32_t>>& t, std::uint64_t key) {
  auto it = std::lower_bound(
      t.begin(), t.end(), key,
      [](const std::pair<std::uint64_t, std::uint32_t>& e, std::uint64_t k) { return e.first < k; });
  if (it == t.end() || it->first != key) return std::nullopt;
  return it->second;
}

}  // namespace

// ---------------------------------------------------------------------------
// TwoCategory

std::uint32_t TwoCategory::object_index(const std::string& id) const {
  auto it = std::lower_bound(objects.begin(), objects.end(), id);
  if (it == objects.end() || *it != id) throw input_error("unknown object: " + id);
  return static_cast<std::uint32_t>(it - objects.begin());
}

std::uint32_t TwoCategory::one_cell_index(const std::string& id) const {
  auto it = std::lower_bound(one_cells.begin(), one_cells.end(), id,
                             [](const OneCell& c, const std::string& s) { return c.id < s; });
  if (it == one_cells.end() || it->id != id) throw input_error("unknown one-cell: " + id);
  return static_cast<std::uint32_t>(it - one_cells.begin());
}

std::uint32_t TwoCategory::two_cell_index(const std::string& id) const {
  auto it = std::lower_bound(two_cells.begin(), two_cells.end(), id,
                             [](const TwoCellRec& c, const std::string& s) { return c.id < s; });
  if (it == two_cells.end() || it->id != id) throw input_error("unknown two-cell: " + id);
  return static_cast<std::uint32_t>(it - two_cells.begin());
}

std::optional<std::uint32_t> TwoCategory::compose_one_opt(std::uint32_t b, std::uint32_t a) const {
  return table_get(one_comp, pair_key(b, a));
}

std::uint32_t TwoCategory::compose_one(std::uint32_t b, std::uint32_t a) const {
  auto r = compose_one_opt(b, a);
  if (!r)
    throw input_error("one-cell composition undefined for (" + one_cells[b].id + ", " +
                      one_cells[a].id + ")");
  return *r;
}

std::optional<std::uint32_t> TwoCategory::vcomp_opt(std::uint32_t s, std::uint32_t t) const {
  return table_get(two_vcomp, pair_key(s, t));
}

std::uint32_t TwoCategory::vcomp(std::uint32_t s, std::uint32_t t) const {
  auto r = vcomp_opt(s, t);
  if (!r)
    throw input_error("vertical composition undefined for (" + two_cells[s].id + ", " +
                      two_cells[t].id + ")");
  return *r;
}

std::optional<std::uint32_t> TwoCategory::hcomp_opt(std::uint32_t s, std::uint32_t t) const {
  return table_get(two_hcomp, pair_key(s, t));
}

std::uint32_t TwoCategory::hcomp(std::uint32_t s, std::uint32_t t) const {
  auto r = hcomp_opt(s, t);
  if (!r)
    throw input_error("horizontal composition undefined for (" + two_cells[s].id + ", " +
                      two_cells[t].id + ")");
  return *r;
}

std::uint64_t TwoCategory::digest() const {
  Digest d;
  d.feed("twocat");
  for (const auto& o : objects) d.feed(o);
  d.feed("|");
  for (const OneCell& c : one_cells) {
    d.feed(c.id);
    d.feed(objects[c.src]);
    d.feed(objects[c.tgt]);
  }
  d.feed("|");
  for (const TwoCellRec& c : two_cells) {
    d.feed(c.id);
    d.feed(one_cells[c.src].id);
    d.feed(one_cells[c.tgt].id);
  }
  d.feed("|");
  for (std::uint32_t i : id_one) d.feed(one_cells[i].id);
  for (std::uint32_t i : id_two) d.feed(two_cells[i].id);
  d.feed("|");
  for (const auto& [key, v] : one_comp) {
    d.feed(one_cells[key >> 32].id);
    d.feed(one_cells[key & 0xffffffffu].id);
    d.feed(one_cells[v].id);
  }
  d.feed("|");
  for (const auto& [key, v] : two_vcomp) {
    d.feed(two_cells[key >> 32].id);
    d.feed(two_cells[key & 0xffffffffu].id);
    d.feed(two_cells[v].id);
  }
  d.feed("|");
  for (const auto& [key, v] : two_hcomp) {
    d.feed(two_cells[key >> 32].id);
    d.feed(two_cells[key & 0xffffffffu].id);
    d.feed(two_cells[v].id);
  }
  return d.value();
}

std::string TwoCategory::digest_hex() const {
  Digest d;
  d.state = digest();
  return d.hex();
}

// ---------------------------------------------------------------------------
// TwoCategoryBuilder

TwoCategoryBuilder& TwoCategoryBuilder::object(const std::string& id) {
  objects_.push_back(id);
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::one_cell(const std::string& id, const std::string& src,
                                                 const std::string& tgt) {
  one_cells_.push_back({id, src, tgt});
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::identity_one(const std::string& obj,
                                                     const std::string& cell) {
  id_one_.push_back({obj, cell});
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::two_cell(const std::string& id, const std::string& src,
                                                 const std::string& tgt) {
  two_cells_.push_back({id, src, tgt});
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::identity_two(const std::string& cell,
                                                     const std::string& two) {
  id_two_.push_back({cell, two});
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::compose_one_rule(const std::string& b,
                                                         const std::string& a,
                                                         const std::string& ba) {
  one_rules_.push_back({b, a, ba});
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::vcomp_rule(const std::string& s, const std::string& t,
                                                   const std::string& st) {
  v_rules_.push_back({s, t, st});
  return *this;
}

TwoCategoryBuilder& TwoCategoryBuilder::hcomp_rule(const std::string& s, const std::string& t,
                                                   const std::string& st) {
  h_rules_.push_back({s, t, st});
  return *this;
}

TwoCatPtr TwoCategoryBuilder::build() const {
  auto g = std::make_shared<TwoCategory>();
  g->name = name_;

  g->objects = objects_;
  std::sort(g->objects.begin(), g->objects.end());
  if (auto it = std::adjacent_find(g->objects.begin(), g->objects.end()); it != g->objects.end())
    throw input_error("duplicate object id: " + *it);

  for (const auto& c : one_cells_)
    g->one_cells.push_back({c[0], g->object_index(c[1]), g->object_index(c[2])});
  std::sort(g->one_cells.begin(), g->one_cells.end(),
            [](const OneCell& x, const OneCell& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < g->one_cells.size(); ++i)
    if (g->one_cells[i - 1].id == g->one_cells[i].id)
      throw input_error("duplicate one-cell id: " + g->one_cells[i].id);

  for (const auto& c : two_cells_)
    g->two_cells.push_back({c[0], g->one_cell_index(c[1]), g->one_cell_index(c[2])});
  std::sort(g->two_cells.begin(), g->two_cells.end(),
            [](const TwoCellRec& x, const TwoCellRec& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < g->two_cells.size(); ++i)
    if (g->two_cells[i - 1].id == g->two_cells[i].id)
      throw input_error("duplicate two-cell id: " + g->two_cells[i].id);

  constexpr std::uint32_t unset = 0xffffffffu;
  g->id_one.assign(g->objects.size(), unset);
  for (const auto& e : id_one_) {
    std::uint32_t o = g->object_index(e[0]);
    if (g->id_one[o] != unset) throw input_error("duplicate identity one-cell for object " + e[0]);
    g->id_one[o] = g->one_cell_index(e[1]);
  }
  for (std::uint32_t o = 0; o < g->n_objects(); ++o)
    if (g->id_one[o] == unset)
      throw input_error("every object needs an identity one-cell: " + g->objects[o]);

  g->id_two.assign(g->one_cells.size(), unset);
  for (const auto& e : id_two_) {
    std::uint32_t a = g->one_cell_index(e[0]);
    if (g->id_two[a] != unset) throw input_error("duplicate identity two-cell for one-cell " + e[0]);
    g->id_two[a] = g->two_cell_index(e[1]);
  }
  for (std::uint32_t a = 0; a < g->n_one_cells(); ++a)
    if (g->id_two[a] == unset)
      throw input_error("every one-cell needs an identity two-cell: " + g->one_cells[a].id);

  std::map<std::uint64_t, std::uint32_t> m1, mv, mh;
  auto put = [](std::map<std::uint64_t, std::uint32_t>& m, std::uint64_t k, std::uint32_t v,
                const char* what) {
    auto [it, inserted] = m.emplace(k, v);
    if (!inserted && it->second != v)
      throw input_error(std::string("conflicting ") + what + " rule");
  };

  for (const auto& r : one_rules_)
    put(m1, pair_key(g->one_cell_index(r[0]), g->one_cell_index(r[1])), g->one_cell_index(r[2]),
        "one-cell composition");
  for (std::uint32_t a = 0; a < g->n_one_cells(); ++a) {
    m1.emplace(pair_key(a, g->id_one[g->one_cells[a].src]), a);
    m1.emplace(pair_key(g->id_one[g->one_cells[a].tgt], a), a);
  }

  for (const auto& r : v_rules_)
    put(mv, pair_key(g->two_cell_index(r[0]), g->two_cell_index(r[1])), g->two_cell_index(r[2]),
        "vertical composition");
  for (std::uint32_t t = 0; t < g->n_two_cells(); ++t) {
    mv.emplace(pair_key(t, g->id_two[g->two_cells[t].src]), t);
    mv.emplace(pair_key(g->id_two[g->two_cells[t].tgt], t), t);
  }

  for (const auto& r : h_rules_)
    put(mh, pair_key(g->two_cell_index(r[0]), g->two_cell_index(r[1])), g->two_cell_index(r[2]),
        "horizontal composition");
  for (const auto& [key, c] : m1)
    mh.emplace(pair_key(g->id_two[key >> 32], g->id_two[key & 0xffffffffu]), g->id_two[c]);
  for (std::uint32_t t = 0; t < g->n_two_cells(); ++t) {
    const OneCell& panel = g->one_cells[g->two_cells[t].src];
    mh.emplace(pair_key(t, g->id_two[g->id_one[panel.src]]), t);
    mh.emplace(pair_key(g->id_two[g->id_one[panel.tgt]], t), t);
  }

  g->one_comp.assign(m1.begin(), m1.end());
  g->two_vcomp.assign(mv.begin(), mv.end());
  g->two_hcomp.assign(mh.begin(), mh.end());
  return g;
}

// ---------------------------------------------------------------------------
// Validation

ValidationReport validate_two_category(const TwoCategory& g) {
  ValidationReport rep;
  const std::uint32_t nobj = g.n_objects();
  const std::uint32_t n1 = g.n_one_cells();
  const std::uint32_t n2 = g.n_two_cells();

  // Shape first; the law scan below indexes freely.
  if (g.id_one.size() != nobj || g.id_two.size() != n1) {
    rep.add("shape", {"identity table size"});
    return rep;
  }
  for (std::size_t i = 1; i < g.objects.size(); ++i)
    if (!(g.objects[i - 1] < g.objects[i])) {
      rep.add("shape", {"object order", g.objects[i]});
      return rep;
    }
  for (std::size_t i = 0; i < n1; ++i) {
    if (i && !(g.one_cells[i - 1].id < g.one_cells[i].id)) {
      rep.add("shape", {"one-cell order", g.one_cells[i].id});
      return rep;
    }
    if (g.one_cells[i].src >= nobj || g.one_cells[i].tgt >= nobj) {
      rep.add("shape", {"one-cell endpoints", g.one_cells[i].id});
      return rep;
    }
  }
  for (std::size_t i = 0; i < n2; ++i) {
    if (i && !(g.two_cells[i - 1].id < g.two_cells[i].id)) {
      rep.add("shape", {"two-cell order", g.two_cells[i].id});
      return rep;
    }
    if (g.two_cells[i].src >= n1 || g.two_cells[i].tgt >= n1) {
      rep.add("shape", {"two-cell endpoints", g.two_cells[i].id});
      return rep;
    }
  }
  for (std::uint32_t i : g.id_one)
    if (i >= n1) {
      rep.add("shape", {"identity one-cell index"});
      return rep;
    }
  for (std::uint32_t i : g.id_two)
    if (i >= n2) {
      rep.add("shape", {"identity two-cell index"});
      return rep;
    }
  auto table_shape = [&](const std::vector<std::pair<std::uint64_t, std::uint32_t>>& t,
                         std::uint32_t bound, const char* what) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i && !(t[i - 1].first < t[i].first)) {
        rep.add("shape", {what, "key order"});
        return false;
      }
      if ((t[i].first >> 32) >= bound || (t[i].first & 0xffffffffu) >= bound ||
          t[i].second >= bound) {
        rep.add("shape", {what, "index range"});
        return false;
      }
    }
    return true;
  };
  if (!table_shape(g.one_comp, n1, "one-composition")) return rep;
  if (!table_shape(g.two_vcomp, n2, "vertical composition")) return rep;
  if (!table_shape(g.two_hcomp, n2, "horizontal composition")) return rep;

  auto oc = [&](std::uint32_t i) -> const OneCell& { return g.one_cells[i]; };
  auto tc = [&](std::uint32_t i) -> const TwoCellRec& { return g.two_cells[i]; };
  // panel of a two-cell: the hom-category its one-cells live in
  auto panel_src = [&](std::uint32_t t) { return oc(tc(t).src).src; };
  auto panel_tgt = [&](std::uint32_t t) { return oc(tc(t).src).tgt; };

  for (std::uint32_t o = 0; o < nobj; ++o) {
    const OneCell& c = oc(g.id_one[o]);
    if (c.src != o || c.tgt != o) rep.add("identity one-cell endpoints", {g.objects[o], c.id});
  }
  for (std::uint32_t t = 0; t < n2; ++t)
    if (oc(tc(t).src).src != oc(tc(t).tgt).src || oc(tc(t).src).tgt != oc(tc(t).tgt).tgt)
      rep.add("two-cell parallelism", {tc(t).id});
  for (std::uint32_t a = 0; a < n1; ++a) {
    const TwoCellRec& t = tc(g.id_two[a]);
    if (t.src != a || t.tgt != a) rep.add("identity two-cell endpoints", {oc(a).id, t.id});
  }

  // one-cell composition
  for (std::uint32_t b = 0; b < n1; ++b)
    for (std::uint32_t a = 0; a < n1; ++a) {
      const bool composable = oc(a).tgt == oc(b).src;
      if (composable != table_get(g.one_comp, pair_key(b, a)).has_value())
        rep.add("one-composition closure", {oc(b).id, oc(a).id});
    }
  for (const auto& [key, c] : g.one_comp) {
    const OneCell& b = oc(static_cast<std::uint32_t>(key >> 32));
    const OneCell& a = oc(static_cast<std::uint32_t>(key & 0xffffffffu));
    if (oc(c).src != a.src || oc(c).tgt != b.tgt)
      rep.add("one-composition endpoints", {b.id, a.id, oc(c).id});
  }
  for (std::uint32_t a = 0; a < n1; ++a) {
    if (table_get(g.one_comp, pair_key(a, g.id_one[oc(a).src])) != a ||
        table_get(g.one_comp, pair_key(g.id_one[oc(a).tgt], a)) != a)
      rep.add("one-composition unit", {oc(a).id});
  }
  for (std::uint32_t c = 0; c < n1; ++c)
    for (std::uint32_t b = 0; b < n1; ++b)
      for (std::uint32_t a = 0; a < n1; ++a) {
        auto ba = table_get(g.one_comp, pair_key(b, a));
        auto cb = table_get(g.one_comp, pair_key(c, b));
        if (!ba || !cb) continue;
        auto l = table_get(g.one_comp, pair_key(c, *ba));
        auto r = table_get(g.one_comp, pair_key(*cb, a));
        if (l && r && *l != *r)
          rep.add("one-composition associativity", {oc(c).id, oc(b).id, oc(a).id});
      }

  // vertical composition
  for (std::uint32_t s = 0; s < n2; ++s)
    for (std::uint32_t t = 0; t < n2; ++t) {
      const bool composable = tc(t).tgt == tc(s).src;
      if (composable != g.vcomp_opt(s, t).has_value())
        rep.add("vertical closure", {tc(s).id, tc(t).id});
    }
  for (const auto& [key, v] : g.two_vcomp) {
    const TwoCellRec& s = tc(static_cast<std::uint32_t>(key >> 32));
    const TwoCellRec& t = tc(static_cast<std::uint32_t>(key & 0xffffffffu));
    if (tc(v).src != t.src || tc(v).tgt != s.tgt)
      rep.add("vertical endpoints", {s.id, t.id, tc(v).id});
  }
  for (std::uint32_t t = 0; t < n2; ++t) {
    if (g.vcomp_opt(t, g.id_two[tc(t).src]) != t || g.vcomp_opt(g.id_two[tc(t).tgt], t) != t)
      rep.add("vertical unit", {tc(t).id});
  }
  for (std::uint32_t u = 0; u < n2; ++u)
    for (std::uint32_t s = 0; s < n2; ++s)
      for (std::uint32_t t = 0; t < n2; ++t) {
        auto st = g.vcomp_opt(s, t);
        auto us = g.vcomp_opt(u, s);
        if (!st || !us) continue;
        auto l = g.vcomp_opt(u, *st);
        auto r = g.vcomp_opt(*us, t);
        if (l && r && *l != *r)
          rep.add("vertical associativity", {tc(u).id, tc(s).id, tc(t).id});
      }

  // horizontal composition
  for (std::uint32_t s = 0; s < n2; ++s)
    for (std::uint32_t t = 0; t < n2; ++t) {
      const bool adjacent = panel_src(s) == panel_tgt(t);
      if (adjacent != g.hcomp_opt(s, t).has_value())
        rep.add("horizontal closure", {tc(s).id, tc(t).id});
    }
  for (const auto& [key, v] : g.two_hcomp) {
    const TwoCellRec& s = tc(static_cast<std::uint32_t>(key >> 32));
    const TwoCellRec& t = tc(static_cast<std::uint32_t>(key & 0xffffffffu));
    auto cs = table_get(g.one_comp, pair_key(s.src, t.src));
    auto ct = table_get(g.one_comp, pair_key(s.tgt, t.tgt));
    if (cs && ct && (tc(v).src != *cs || tc(v).tgt != *ct))
      rep.add("horizontal endpoints", {s.id, t.id, tc(v).id});
  }
  for (std::uint32_t t = 0; t < n2; ++t) {
    if (g.hcomp_opt(t, g.id_two[g.id_one[panel_src(t)]]) != t ||
        g.hcomp_opt(g.id_two[g.id_one[panel_tgt(t)]], t) != t)
      rep.add("horizontal unit", {tc(t).id});
  }
  for (const auto& [key, c] : g.one_comp) {
    auto b = static_cast<std::uint32_t>(key >> 32);
    auto a = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (g.hcomp_opt(g.id_two[b], g.id_two[a]) != g.id_two[c])
      rep.add("horizontal identities", {oc(b).id, oc(a).id});
  }
  for (std::uint32_t u = 0; u < n2; ++u)
    for (std::uint32_t s = 0; s < n2; ++s)
      for (std::uint32_t t = 0; t < n2; ++t) {
        if (panel_src(u) != panel_tgt(s) || panel_src(s) != panel_tgt(t)) continue;
        auto us = g.hcomp_opt(u, s);
        auto st = g.hcomp_opt(s, t);
        if (!us || !st) continue;
        auto l = g.hcomp_opt(*us, t);
        auto r = g.hcomp_opt(u, *st);
        if (l && r && *l != *r)
          rep.add("horizontal associativity", {tc(u).id, tc(s).id, tc(t).id});
      }
  for (const auto& [k1, sv] : g.two_vcomp)
    for (const auto& [k2, tv] : g.two_vcomp) {
      auto s2 = static_cast<std::uint32_t>(k1 >> 32);
      auto s1 = static_cast<std::uint32_t>(k1 & 0xffffffffu);
      auto t2 = static_cast<std::uint32_t>(k2 >> 32);
      auto t1 = static_cast<std::uint32_t>(k2 & 0xffffffffu);
      if (panel_src(s1) != panel_tgt(t1)) continue;
      auto h1 = g.hcomp_opt(s1, t1);
      auto h2 = g.hcomp_opt(s2, t2);
      auto lhs = g.hcomp_opt(sv, tv);
      if (!h1 || !h2 || !lhs) continue;
      auto rhs = g.vcomp_opt(*h2, *h1);
      if (rhs && *lhs != *rhs)
        rep.add("interchange", {tc(s2).id, tc(s1).id, tc(t2).id, tc(t1).id});
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Stock shapes

namespace {

void add_trivial_object(TwoCategoryBuilder& b, const std::string& o) {
  b.object(o);
  b.one_cell("id" + o, o, o).identity_one(o, "id" + o);
  b.two_cell("iid" + o, "id" + o, "id" + o).identity_two("id" + o, "iid" + o);
}

void add_plain_cell(TwoCategoryBuilder& b, const std::string& id, const std::string& src,
                    const std::string& tgt) {
  b.one_cell(id, src, tgt);
  b.two_cell("i" + id, id, id).identity_two(id, "i" + id);
}

}  // namespace

TwoCatPtr two_cat_terminal() {
  TwoCategoryBuilder b("terminal2");
  add_trivial_object(b, "0");
  return b.build();
}

TwoCatPtr two_cat_discrete(int n) {
  if (n < 0) throw input_error("discrete 2-category needs a non-negative size");
  TwoCategoryBuilder b("discrete2(" + std::to_string(n) + ")");
  for (int i = 0; i < n; ++i) add_trivial_object(b, std::to_string(i));
  return b.build();
}

TwoCatPtr two_cat_arrow() {
  TwoCategoryBuilder b("arrow2");
  add_trivial_object(b, "0");
  add_trivial_object(b, "1");
  add_plain_cell(b, "a", "0", "1");
  return b.build();
}

TwoCatPtr two_cat_chain() {
  TwoCategoryBuilder b("chain2");
  add_trivial_object(b, "0");
  add_trivial_object(b, "1");
  add_trivial_object(b, "2");
  add_plain_cell(b, "a", "0", "1");
  add_plain_cell(b, "b", "1", "2");
  add_plain_cell(b, "ba", "0", "2");
  b.compose_one_rule("b", "a", "ba");
  return b.build();
}

TwoCatPtr two_cat_walking_cell() {
  TwoCategoryBuilder b("walking2");
  add_trivial_object(b, "0");
  add_trivial_object(b, "1");
  add_plain_cell(b, "a", "0", "1");
  add_plain_cell(b, "b", "0", "1");
  b.two_cell("t", "a", "b");
  return b.build();
}

TwoCatPtr two_cat_cospan() {
  TwoCategoryBuilder b("cospan2");
  add_trivial_object(b, "0");
  add_trivial_object(b, "1");
  add_trivial_object(b, "2");
  add_plain_cell(b, "a", "0", "2");
  add_plain_cell(b, "b", "1", "2");
  return b.build();
}

// ---------------------------------------------------------------------------
// TwoFunctor

TwoFunctor make_two_functor(const TwoCatPtr& g, std::vector<CatPtr> obs,
                            const std::vector<std::pair<std::string, FinFunctor>>& ones,
                            const std::vector<std::pair<std::string, NatTransformation>>& twos) {
  if (!g) throw input_error("make_two_functor: null source 2-category");
  if (obs.size() != g->n_objects())
    throw input_error("make_two_functor: one category per source object required");
  for (const CatPtr& c : obs)
    if (!c) throw input_error("make_two_functor: null category value");

  TwoFunctor h;
  h.source = g;
  h.obs = std::move(obs);
  h.ones.resize(g->n_one_cells());
  h.twos.resize(g->n_two_cells());

  std::vector<char> has1(g->n_one_cells(), 0), has2(g->n_two_cells(), 0);
  for (const auto& [id, f] : ones) {
    std::uint32_t a = g->one_cell_index(id);
    h.ones[a] = f;
    has1[a] = 1;
  }
  for (std::uint32_t o = 0; o < g->n_objects(); ++o)
    if (!has1[g->id_one[o]]) {
      h.ones[g->id_one[o]] = identity_functor(h.obs[o]);
      has1[g->id_one[o]] = 1;
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [key, c] : g->one_comp) {
      auto b = static_cast<std::uint32_t>(key >> 32);
      auto a = static_cast<std::uint32_t>(key & 0xffffffffu);
      if (!has1[c] && has1[a] && has1[b]) {
        h.ones[c] = compose_functors(h.ones[b], h.ones[a]);
        has1[c] = 1;
        changed = true;
      }
    }
  }
  for (std::uint32_t a = 0; a < g->n_one_cells(); ++a)
    if (!has1[a]) throw input_error("make_two_functor: one-cell value missing: " + g->one_cells[a].id);

  for (const auto& [id, n] : twos) {
    std::uint32_t t = g->two_cell_index(id);
    h.twos[t] = n;
    has2[t] = 1;
  }
  for (std::uint32_t a = 0; a < g->n_one_cells(); ++a)
    if (!has2[g->id_two[a]]) {
      h.twos[g->id_two[a]] = identity_nat(h.ones[a]);
      has2[g->id_two[a]] = 1;
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [key, v] : g->two_vcomp) {
      auto s = static_cast<std::uint32_t>(key >> 32);
      auto t = static_cast<std::uint32_t>(key & 0xffffffffu);
      if (!has2[v] && has2[s] && has2[t]) {
        h.twos[v] = vcompose_nat(h.twos[s], h.twos[t]);
        has2[v] = 1;
        changed = true;
      }
    }
    for (const auto& [key, v] : g->two_hcomp) {
      auto s = static_cast<std::uint32_t>(key >> 32);
      auto t = static_cast<std::uint32_t>(key & 0xffffffffu);
      if (!has2[v] && has2[s] && has2[t]) {
        h.twos[v] = hcompose_nat(h.twos[s], h.twos[t]);
        has2[v] = 1;
        changed = true;
      }
    }
  }
  for (std::uint32_t t = 0; t < g->n_two_cells(); ++t)
    if (!has2[t]) throw input_error("make_two_functor: two-cell value missing: " + g->two_cells[t].id);
  return h;
}

TwoFunctor terminal_weight(const TwoCatPtr& g) {
  if (!g) throw input_error("terminal_weight: null source 2-category");
  TwoFunctor w;
  w.source = g;
  const CatPtr pt = terminal_category();
  w.obs.assign(g->n_objects(), pt);
  w.ones.assign(g->n_one_cells(), identity_functor(pt));
  w.twos.assign(g->n_two_cells(), identity_nat(identity_functor(pt)));
  return w;
}

ValidationReport validate_two_functor(const TwoFunctor& h) {
  ValidationReport rep;
  if (!h.source) {
    rep.add("shape", {"missing source 2-category"});
    return rep;
  }
  const TwoCategory& g = *h.source;
  ValidationReport src = validate_two_category(g);
  if (!src.ok) {
    rep.add("source 2-category", {src.violations.front().law});
    return rep;
  }
  if (h.obs.size() != g.n_objects() || h.ones.size() != g.n_one_cells() ||
      h.twos.size() != g.n_two_cells()) {
    rep.add("shape", {"value table size"});
    return rep;
  }
  for (std::uint32_t o = 0; o < g.n_objects(); ++o)
    if (!h.obs[o]) {
      rep.add("object value", {g.objects[o]});
      return rep;
    }

  bool wired = true;
  for (std::uint32_t a = 0; a < g.n_one_cells(); ++a) {
    const FinFunctor& f = h.ones[a];
    if (!same_category(f.source, h.obs[g.one_cells[a].src]) ||
        !same_category(f.target, h.obs[g.one_cells[a].tgt])) {
      rep.add("one-cell endpoints", {g.one_cells[a].id});
      wired = false;
      continue;
    }
    if (!validate_functor(f).ok) {
      rep.add("one-cell functor", {g.one_cells[a].id});
      wired = false;
    }
  }
  if (!wired) return rep;
  for (std::uint32_t t = 0; t < g.n_two_cells(); ++t) {
    const NatTransformation& n = h.twos[t];
    if (!functor_equal(n.source, h.ones[g.two_cells[t].src]) ||
        !functor_equal(n.target, h.ones[g.two_cells[t].tgt])) {
      rep.add("two-cell endpoints", {g.two_cells[t].id});
      wired = false;
      continue;
    }
    if (!validate_nat_trans(n).ok) {
      rep.add("two-cell transformation", {g.two_cells[t].id});
      wired = false;
    }
  }
  if (!wired) return rep;

  for (std::uint32_t o = 0; o < g.n_objects(); ++o)
    if (!functor_equal(h.ones[g.id_one[o]], identity_functor(h.obs[o])))
      rep.add("identity one-cell value", {g.objects[o]});
  for (const auto& [key, c] : g.one_comp) {
    auto b = static_cast<std::uint32_t>(key >> 32);
    auto a = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (!functor_equal(h.ones[c], compose_functors(h.ones[b], h.ones[a])))
      rep.add("composite one-cell value", {g.one_cells[b].id, g.one_cells[a].id});
  }
  for (std::uint32_t a = 0; a < g.n_one_cells(); ++a)
    if (!nat_equal(h.twos[g.id_two[a]], identity_nat(h.ones[a])))
      rep.add("identity two-cell value", {g.one_cells[a].id});
  for (const auto& [key, v] : g.two_vcomp) {
    auto s = static_cast<std::uint32_t>(key >> 32);
    auto t = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (!nat_equal(h.twos[v], vcompose_nat(h.twos[s], h.twos[t])))
      rep.add("vertical composite value", {g.two_cells[s].id, g.two_cells[t].id});
  }
  for (const auto& [key, v] : g.two_hcomp) {
    auto s = static_cast<std::uint32_t>(key >> 32);
    auto t = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (!nat_equal(h.twos[v], hcompose_nat(h.twos[s], h.twos[t])))
      rep.add("horizontal composite value", {g.two_cells[s].id, g.two_cells[t].id});
  }
  return rep;
}

std::string two_functor_digest_hex(const TwoFunctor& h) {
  Digest d;
  d.feed("twofun");
  if (h.source) {
    Digest s;
    s.state = h.source->digest();
    d.feed(s.hex());
  }
  for (const CatPtr& c : h.obs) d.feed(c ? c->digest_hex() : "null");
  for (const FinFunctor& f : h.ones) d.feed(functor_digest_hex(f));
  for (const NatTransformation& n : h.twos) d.feed(nat_digest_hex(n));
  return d.hex();
}

// ---------------------------------------------------------------------------
// Lax / oplax / pseudo limits, direct

namespace {

struct LimitShape {
  const char* what;           // for error messages
  const char* head;           // object id head
  const char* carrier_key;    // "L" / "M"
  const char* connector_key;  // "l" / "m"
  const char* construction;   // provenance block
  const char* name_head;      // category name prefix
  bool oplax = false;
  bool invertible_only = false;
};

constexpr LimitShape lax_shape{"lax limit", "lax", "L", "l", "lax-limit", "laxlim", false, false};
constexpr LimitShape oplax_shape{"oplax limit", "oplax", "M", "m",
                                 "oplax-limit", "oplaxlim", true, false};
constexpr LimitShape pseudo_shape{"pseudo limit", "lax", "L", "l",
                                  "pseudo-limit", "pseudolim", false, true};
// the engine build of the pseudo limit runs in the oplax orientation
constexpr LimitShape pseudo_pie_shape{"pseudo limit", "oplax", "M", "m",
                                      "pseudo-limit", "pseudolim", true, true};

void require_strict(const TwoFunctor& h, const LimitShape& sh) {
  if (!validate_two_functor(h).ok)
    throw input_error(std::string(sh.what) + " needs a valid strict 2-functor");
}

TwoLimitResult limit_direct_impl(const TwoFunctor& h, const LimitShape& sh, const Budget& budget) {
  require_strict(h, sh);
  const TwoCategory& g = *h.source;
  BudgetMeter meter(budget);
  const std::uint32_t ng = g.n_objects();
  const std::uint32_t n1 = g.n_one_cells();

  std::vector<std::uint32_t> nonid;
  for (std::uint32_t a = 0; a < n1; ++a)
    if (!g.one_is_identity(a)) nonid.push_back(a);

  std::vector<std::string> oids;
  std::vector<std::vector<std::uint32_t>> carriers, connectors;

  std::vector<std::size_t> osizes(ng);
  for (std::uint32_t o = 0; o < ng; ++o) osizes[o] = h.obs[o]->n_objects();
  std::vector<std::uint32_t> car(ng), con(n1);
  odometer_pos(osizes, [&](const std::vector<std::size_t>& opos) {
    meter.spend(1, "limit carrier enumeration");
    for (std::uint32_t o = 0; o < ng; ++o) car[o] = static_cast<std::uint32_t>(opos[o]);
    std::vector<const std::vector<std::uint32_t>*> cands(nonid.size());
    std::vector<std::size_t> msizes(nonid.size());
    for (std::size_t j = 0; j < nonid.size(); ++j) {
      const OneCell& cell = g.one_cells[nonid[j]];
      const std::uint32_t img = h.ones[nonid[j]].omap[car[cell.src]];
      cands[j] = sh.oplax ? &h.obs[cell.tgt]->hom(car[cell.tgt], img)
                          : &h.obs[cell.tgt]->hom(img, car[cell.tgt]);
      msizes[j] = cands[j]->size();
    }
    for (std::uint32_t o = 0; o < ng; ++o) con[g.id_one[o]] = h.obs[o]->identity[car[o]];
    odometer_pos(msizes, [&](const std::vector<std::size_t>& mpos) {
      meter.spend(1, "limit connector enumeration");
      for (std::size_t j = 0; j < nonid.size(); ++j) con[nonid[j]] = (*cands[j])[mpos[j]];
      for (const auto& [key, c] : g.one_comp) {
        auto b = static_cast<std::uint32_t>(key >> 32);
        auto a = static_cast<std::uint32_t>(key & 0xffffffffu);
        const FinCategory& ke = *h.obs[g.one_cells[b].tgt];
        const std::uint32_t img = h.ones[b].mmap[con[a]];
        if (con[c] != (sh.oplax ? ke.compose(img, con[b]) : ke.compose(con[b], img))) return;
      }
      for (std::uint32_t t = 0; t < g.n_two_cells(); ++t) {
        const std::uint32_t a = g.two_cells[t].src;
        const std::uint32_t b = g.two_cells[t].tgt;
        const OneCell& cell = g.one_cells[a];
        const FinCategory& kd = *h.obs[cell.tgt];
        const std::uint32_t phi = h.twos[t].component[car[cell.src]];
        if (sh.oplax) {
          if (kd.compose(phi, con[a]) != con[b]) return;
        } else {
          if (kd.compose(con[b], phi) != con[a]) return;
        }
      }
      if (sh.invertible_only)
        for (std::uint32_t j : nonid)
          if (!h.obs[g.one_cells[j].tgt]->inverse(con[j])) return;
      std::vector<std::string> cids(ng), mids(n1);
      for (std::uint32_t o = 0; o < ng; ++o) cids[o] = h.obs[o]->obj_id(car[o]);
      for (std::uint32_t a = 0; a < n1; ++a)
        mids[a] = h.obs[g.one_cells[a].tgt]->mor_id(con[a]);
      oids.push_back(enc_call(sh.head, {{sh.carrier_key, enc_tuple(cids)},
                                        {sh.connector_key, enc_tuple(mids)}}));
      carriers.push_back(car);
      connectors.push_back(con);
      meter.check_objects(oids.size(), "limit carrier enumeration");
    });
  });

  const auto nobj = static_cast<std::uint32_t>(oids.size());
  if (static_cast<std::uint64_t>(nobj) * nobj > meter.limits.candidates)
    throw resource_error("candidate budget exceeded in limit family enumeration");
  std::vector<TupleBucket> buckets(static_cast<std::size_t>(nobj) * nobj);
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<std::array<std::uint32_t, 2>> ends;

  for (std::uint32_t i = 0; i < nobj; ++i) {
    for (std::uint32_t j = 0; j < nobj; ++j) {
      TupleBucket& b = buckets[static_cast<std::size_t>(i) * nobj + j];
      b.base = static_cast<std::uint32_t>(comps.size());
      b.cands.resize(ng);
      std::vector<std::size_t> sizes(ng);
      for (std::uint32_t o = 0; o < ng; ++o) {
        b.cands[o] = &h.obs[o]->hom(carriers[i][o], carriers[j][o]);
        sizes[o] = b.cands[o]->size();
      }
      b.strides = suffix_strides(sizes);
      std::uint64_t next_rank = 0;
      std::vector<std::uint32_t> at(ng);
      odometer_pos(sizes, [&](const std::vector<std::size_t>& pos) {
        meter.spend(1, "limit family enumeration");
        const std::uint64_t rk = next_rank++;
        for (std::uint32_t o = 0; o < ng; ++o) at[o] = (*b.cands[o])[pos[o]];
        for (std::uint32_t a : nonid) {
          const OneCell& cell = g.one_cells[a];
          const FinCategory& kd = *h.obs[cell.tgt];
          const std::uint32_t img = h.ones[a].mmap[at[cell.src]];
          if (sh.oplax) {
            if (kd.compose(img, connectors[i][a]) != kd.compose(connectors[j][a], at[cell.tgt]))
              return;
          } else {
            if (kd.compose(at[cell.tgt], connectors[i][a]) != kd.compose(connectors[j][a], img))
              return;
          }
        }
        b.kept.push_back(rk);
        comps.push_back(at);
        ends.push_back({i, j});
        meter.check_morphisms(comps.size(), "limit family enumeration");
      });
    }
  }

  AssembleInput ai;
  ai.name = std::string(sh.name_head) + "(" + g.name + ")";
  ai.prov = Provenance{sh.construction, {{"H", two_functor_digest_hex(h)}}};
  ai.objects = oids;
  std::vector<std::string> mids(comps.size());
  ai.morphisms.reserve(comps.size());
  for (std::uint32_t m = 0; m < comps.size(); ++m) {
    std::vector<std::string> at(ng);
    for (std::uint32_t o = 0; o < ng; ++o) at[o] = h.obs[o]->mor_id(comps[m][o]);
    mids[m] = enc_call(
        "fam", {{"src", oids[ends[m][0]]}, {"tgt", oids[ends[m][1]]}, {"at", enc_tuple(at)}});
    ai.morphisms.push_back({mids[m], ends[m][0], ends[m][1]});
  }

  ai.identity.resize(nobj);
  for (std::uint32_t i = 0; i < nobj; ++i) {
    const TupleBucket& b = buckets[static_cast<std::size_t>(i) * nobj + i];
    std::vector<std::uint32_t> at(ng);
    for (std::uint32_t o = 0; o < ng; ++o) at[o] = h.obs[o]->identity[carriers[i][o]];
    ai.identity[i] = bucket_find(b, bucket_rank(b, at), "limit: identity family not enumerated");
  }

  std::uint64_t n_comp = 0;
  std::vector<std::uint32_t> at(ng);
  for (std::uint32_t i = 0; i < nobj; ++i)
    for (std::uint32_t j = 0; j < nobj; ++j) {
      const TupleBucket& b1 = buckets[static_cast<std::size_t>(i) * nobj + j];
      if (b1.kept.empty()) continue;
      for (std::uint32_t k = 0; k < nobj; ++k) {
        const TupleBucket& b2 = buckets[static_cast<std::size_t>(j) * nobj + k];
        if (b2.kept.empty()) continue;
        const TupleBucket& b3 = buckets[static_cast<std::size_t>(i) * nobj + k];
        const auto e1 = b1.base + static_cast<std::uint32_t>(b1.kept.size());
        const auto e2 = b2.base + static_cast<std::uint32_t>(b2.kept.size());
        for (std::uint32_t m1 = b1.base; m1 < e1; ++m1)
          for (std::uint32_t m2 = b2.base; m2 < e2; ++m2) {
            meter.spend(1, "limit composition");
            ++n_comp;
            meter.check_comp(n_comp, "limit composition");
            for (std::uint32_t o = 0; o < ng; ++o)
              at[o] = h.obs[o]->compose(comps[m2][o], comps[m1][o]);
            ai.comp.push_back(
                {m2, m1, bucket_find(b3, bucket_rank(b3, at), "limit: composite family not enumerated")});
          }
      }
    }

  TwoLimitResult out;
  out.cat = assemble_category(std::move(ai), &meter);
  out.carrier.resize(nobj);
  out.connector.resize(nobj);
  out.component.resize(comps.size());
  for (std::uint32_t i = 0; i < nobj; ++i) {
    const std::uint32_t n = out.cat->object_index(oids[i]);
    out.carrier[n] = std::move(carriers[i]);
    out.connector[n] = std::move(connectors[i]);
  }
  for (std::uint32_t m = 0; m < comps.size(); ++m)
    out.component[out.cat->morphism_index(mids[m])] = std::move(comps[m]);
  return out;
}

}  // namespace

TwoLimitResult lax_limit_direct(const TwoFunctor& h, const Budget& budget) {
  return limit_direct_impl(h, lax_shape, budget);
}

TwoLimitResult oplax_limit_direct(const TwoFunctor& h, const Budget& budget) {
  return limit_direct_impl(h, oplax_shape, budget);
}

TwoLimitResult pseudo_limit_direct(const TwoFunctor& h, const Budget& budget) {
  return limit_direct_impl(h, pseudo_shape, budget);
}

FinFunctor two_limit_projection(const TwoLimitResult& r, const TwoFunctor& h, std::uint32_t obj) {
  if (!r.cat || !h.source) throw input_error("two_limit_projection: empty inputs");
  if (obj >= h.source->n_objects()) throw input_error("two_limit_projection: object out of range");
  FinFunctor f;
  f.source = r.cat;
  f.target = h.obs[obj];
  f.omap.resize(r.carrier.size());
  f.mmap.resize(r.component.size());
  for (std::size_t i = 0; i < r.carrier.size(); ++i) f.omap[i] = r.carrier[i][obj];
  for (std::size_t m = 0; m < r.component.size(); ++m) f.mmap[m] = r.component[m][obj];
  return f;
}

// ---------------------------------------------------------------------------
// Lax / oplax / pseudo limits via the tuple engine

namespace {

TupleSpec limit_pie_spec_impl(const TwoFunctor& h, const LimitShape& sh) {
  require_strict(h, sh);
  auto hp = std::make_shared<const TwoFunctor>(h);
  const TwoCategory& g = *hp->source;

  TupleSpec s;
  s.name = std::string(sh.name_head) + "-pie(" + g.name + ")";
  s.factors = hp->obs;
  for (std::uint32_t a = 0; a < g.n_one_cells(); ++a) {
    const OneCell& cell = g.one_cells[a];
    if (sh.oplax)
      s.slots.push_back({cell.tgt, cell.src, identity_functor(hp->obs[cell.tgt]), hp->ones[a]});
    else
      s.slots.push_back({cell.src, cell.tgt, hp->ones[a], identity_functor(hp->obs[cell.tgt])});
  }

  s.families.push_back({"unit", [hp](const TupleObject& t) {
                          const TwoCategory& gg = *hp->source;
                          for (std::uint32_t o = 0; o < gg.n_objects(); ++o)
                            if (t.structure[gg.id_one[o]] != hp->obs[o]->identity[t.carrier[o]])
                              return false;
                          return true;
                        }});
  const bool oplax = sh.oplax;
  s.families.push_back({"composition", [hp, oplax](const TupleObject& t) {
                          const TwoCategory& gg = *hp->source;
                          for (const auto& [key, c] : gg.one_comp) {
                            auto b = static_cast<std::uint32_t>(key >> 32);
                            auto a = static_cast<std::uint32_t>(key & 0xffffffffu);
                            const FinCategory& ke = *hp->obs[gg.one_cells[b].tgt];
                            const std::uint32_t img = hp->ones[b].mmap[t.structure[a]];
                            const std::uint32_t rhs = oplax ? ke.compose(img, t.structure[b])
                                                            : ke.compose(t.structure[b], img);
                            if (t.structure[c] != rhs) return false;
                          }
                          return true;
                        }});
  s.families.push_back({"two-cell", [hp, oplax](const TupleObject& t) {
                          const TwoCategory& gg = *hp->source;
                          for (std::uint32_t w = 0; w < gg.n_two_cells(); ++w) {
                            const std::uint32_t a = gg.two_cells[w].src;
                            const std::uint32_t b = gg.two_cells[w].tgt;
                            const OneCell& cell = gg.one_cells[a];
                            const FinCategory& kd = *hp->obs[cell.tgt];
                            const std::uint32_t phi = hp->twos[w].component[t.carrier[cell.src]];
                            if (oplax) {
                              if (kd.compose(phi, t.structure[a]) != t.structure[b]) return false;
                            } else {
                              if (kd.compose(t.structure[b], phi) != t.structure[a]) return false;
                            }
                          }
                          return true;
                        }});
  if (sh.invertible_only)
    s.families.push_back({"invertible", [hp](const TupleObject& t) {
                            const TwoCategory& gg = *hp->source;
                            for (std::uint32_t a = 0; a < gg.n_one_cells(); ++a)
                              if (!hp->obs[gg.one_cells[a].tgt]->inverse(t.structure[a]))
                                return false;
                            return true;
                          }});
  s.prov =
      Provenance{std::string(sh.construction) + "-via-pie", {{"H", two_functor_digest_hex(h)}}};
  return s;
}

TwoLimitPie limit_via_pie_impl(const TwoFunctor& h, const LimitShape& direct_sh,
                               const LimitShape& pie_sh, bool invert_key, const Budget& budget,
                               const char* mismatch) {
  TwoLimitPie out;
  out.direct = limit_direct_impl(h, direct_sh, budget);
  out.pie = build_tuple_category(limit_pie_spec_impl(h, pie_sh), budget);

  const TwoCategory& g = *h.source;
  const FinCategory& dc = *out.direct.cat;
  std::vector<std::vector<std::uint32_t>> obj_key(dc.n_objects());
  for (std::uint32_t i = 0; i < dc.n_objects(); ++i) {
    obj_key[i] = out.direct.carrier[i];
    for (std::uint32_t a = 0; a < g.n_one_cells(); ++a) {
      std::uint32_t glue = out.direct.connector[i][a];
      if (invert_key) glue = *h.obs[g.one_cells[a].tgt]->inverse(glue);
      obj_key[i].push_back(glue);
    }
  }
  out.witness = data_witness(out.direct.cat, out.pie, obj_key, out.direct.component, mismatch);
  return out;
}

}  // namespace

TupleSpec lax_limit_pie_spec(const TwoFunctor& h) { return limit_pie_spec_impl(h, lax_shape); }

TupleSpec oplax_limit_pie_spec(const TwoFunctor& h) { return limit_pie_spec_impl(h, oplax_shape); }

TupleSpec pseudo_limit_pie_spec(const TwoFunctor& h) {
  return limit_pie_spec_impl(h, pseudo_pie_shape);
}

TwoLimitPie lax_limit_via_pie(const TwoFunctor& h, const Budget& budget) {
  return limit_via_pie_impl(h, lax_shape, lax_shape, false, budget,
                            "lax limit: pipeline output does not match the direct build");
}

TwoLimitPie oplax_limit_via_pie(const TwoFunctor& h, const Budget& budget) {
  return limit_via_pie_impl(h, oplax_shape, oplax_shape, false, budget,
                            "oplax limit: pipeline output does not match the direct build");
}

TwoLimitPie pseudo_limit_via_pie(const TwoFunctor& h, const Budget& budget) {
  return limit_via_pie_impl(h, pseudo_shape, pseudo_pie_shape, true, budget,
                            "pseudo limit: pipeline output does not match the direct build");
}

// ---------------------------------------------------------------------------
// Weighted pseudolimits

namespace {

std::string fun_obj_id(const FinCategory& k, const std::vector<std::uint32_t>& omap,
                       const std::vector<std::uint32_t>& mmap) {
  std::vector<std::string> oids(omap.size()), mids(mmap.size());
  for (std::size_t i = 0; i < omap.size(); ++i) oids[i] = k.obj_id(omap[i]);
  for (std::size_t i = 0; i < mmap.size(); ++i) mids[i] = k.mor_id(mmap[i]);
  return enc_call("fun", {{"o", enc_tuple(oids)}, {"m", enc_tuple(mids)}});
}

}  // namespace

WeightedResult weighted_pseudolimit(const TwoFunctor& w, const TwoFunctor& h,
                                    const Budget& budget) {
  if (!w.source || !h.source ||
      (w.source != h.source && w.source->digest() != h.source->digest()))
    throw input_error("weighted pseudolimit needs a weight and diagram over one shape");
  if (!validate_two_functor(w).ok || !validate_two_functor(h).ok)
    throw input_error("weighted pseudolimit needs valid strict 2-functors");
  const TwoCategory& g = *h.source;
  BudgetMeter meter(budget);
  const std::uint32_t ng = g.n_objects();
  const std::uint32_t n1 = g.n_one_cells();

  std::vector<std::uint32_t> nonid;
  for (std::uint32_t a = 0; a < n1; ++a)
    if (!g.one_is_identity(a)) nonid.push_back(a);
  std::vector<std::vector<std::uint32_t>> wnonid(ng);  // non-identity morphisms of each W value
  for (std::uint32_t o = 0; o < ng; ++o)
    for (std::uint32_t m = 0; m < w.obs[o]->n_morphisms(); ++m)
      if (!w.obs[o]->is_identity(m)) wnonid[o].push_back(m);

  WeightedResult out;
  out.functors.resize(ng);
  std::vector<std::vector<std::string>> fun_ids(ng);
  for (std::uint32_t o = 0; o < ng; ++o) {
    for_each_functor(w.obs[o], h.obs[o], meter,
                     [&](const std::vector<std::uint32_t>& omap,
                         const std::vector<std::uint32_t>& mmap) {
                       FinFunctor f;
                       f.source = w.obs[o];
                       f.target = h.obs[o];
                       f.omap = omap;
                       f.mmap = mmap;
                       fun_ids[o].push_back(fun_obj_id(*h.obs[o], omap, mmap));
                       out.functors[o].push_back(std::move(f));
                     });
  }

  struct PNat {
    std::vector<std::uint32_t> sel;                // functor index per source object
    std::vector<std::vector<std::uint32_t>> fill;  // per one-cell, per W(src) object
  };
  std::vector<PNat> objs;
  std::vector<std::string> oids;

  std::vector<std::size_t> osizes(ng);
  for (std::uint32_t o = 0; o < ng; ++o) osizes[o] = out.functors[o].size();
  odometer_pos(osizes, [&](const std::vector<std::size_t>& opos) {
    meter.spend(1, "pseudonatural enumeration");
    std::vector<std::uint32_t> sel(ng);
    for (std::uint32_t o = 0; o < ng; ++o) sel[o] = static_cast<std::uint32_t>(opos[o]);

    // candidate fillers per non-identity one-cell: invertible and natural
    std::vector<std::vector<std::vector<std::uint32_t>>> cand(nonid.size());
    bool alive = true;
    for (std::size_t j = 0; j < nonid.size() && alive; ++j) {
      const std::uint32_t a = nonid[j];
      const OneCell& cell = g.one_cells[a];
      const FinFunctor& sg = out.functors[cell.src][sel[cell.src]];
      const FinFunctor& sd = out.functors[cell.tgt][sel[cell.tgt]];
      const FinFunctor& wa = w.ones[a];
      const FinFunctor& ha = h.ones[a];
      const FinCategory& wc = *w.obs[cell.src];
      const FinCategory& kd = *h.obs[cell.tgt];
      const std::uint32_t nx = wc.n_objects();
      std::vector<const std::vector<std::uint32_t>*> cc(nx);
      std::vector<std::size_t> sizes(nx);
      for (std::uint32_t x = 0; x < nx; ++x) {
        cc[x] = &kd.hom(ha.omap[sg.omap[x]], sd.omap[wa.omap[x]]);
        sizes[x] = cc[x]->size();
      }
      std::vector<std::uint32_t> comp(nx);
      odometer_pos(sizes, [&](const std::vector<std::size_t>& pos) {
        meter.spend(1, "filler enumeration");
        for (std::uint32_t x = 0; x < nx; ++x) comp[x] = (*cc[x])[pos[x]];
        for (std::uint32_t x = 0; x < nx; ++x)
          if (!kd.inverse(comp[x])) return;
        for (std::uint32_t u : wnonid[cell.src])
          if (kd.compose(sd.mmap[wa.mmap[u]], comp[wc.src(u)]) !=
              kd.compose(comp[wc.tgt(u)], ha.mmap[sg.mmap[u]]))
            return;
        cand[j].push_back(comp);
      });
      if (cand[j].empty()) alive = false;
    }
    if (!alive) return;

    std::vector<std::size_t> fsizes(nonid.size());
    for (std::size_t j = 0; j < nonid.size(); ++j) fsizes[j] = cand[j].size();
    odometer_pos(fsizes, [&](const std::vector<std::size_t>& fpos) {
      meter.spend(1, "pseudonatural enumeration");
      std::vector<std::vector<std::uint32_t>> fill(n1);
      for (std::uint32_t o = 0; o < ng; ++o) {
        const FinFunctor& so = out.functors[o][sel[o]];
        fill[g.id_one[o]].resize(w.obs[o]->n_objects());
        for (std::uint32_t x = 0; x < w.obs[o]->n_objects(); ++x)
          fill[g.id_one[o]][x] = h.obs[o]->identity[so.omap[x]];
      }
      for (std::size_t j = 0; j < nonid.size(); ++j) fill[nonid[j]] = cand[j][fpos[j]];

      for (const auto& [key, c] : g.one_comp) {
        auto b = static_cast<std::uint32_t>(key >> 32);
        auto a = static_cast<std::uint32_t>(key & 0xffffffffu);
        const std::uint32_t gsrc = g.one_cells[a].src;
        const FinCategory& ke = *h.obs[g.one_cells[b].tgt];
        for (std::uint32_t x = 0; x < w.obs[gsrc]->n_objects(); ++x)
          if (fill[c][x] !=
              ke.compose(fill[b][w.ones[a].omap[x]], h.ones[b].mmap[fill[a][x]]))
            return;
      }
      for (std::uint32_t t = 0; t < g.n_two_cells(); ++t) {
        const std::uint32_t a = g.two_cells[t].src;
        const std::uint32_t b = g.two_cells[t].tgt;
        const OneCell& cell = g.one_cells[a];
        const FinCategory& kd = *h.obs[cell.tgt];
        const FinFunctor& sg = out.functors[cell.src][sel[cell.src]];
        const FinFunctor& sd = out.functors[cell.tgt][sel[cell.tgt]];
        for (std::uint32_t x = 0; x < w.obs[cell.src]->n_objects(); ++x)
          if (kd.compose(fill[b][x], h.twos[t].component[sg.omap[x]]) !=
              kd.compose(sd.mmap[w.twos[t].component[x]], fill[a][x]))
            return;
      }

      std::vector<std::string> fids(ng), tids(n1);
      for (std::uint32_t o = 0; o < ng; ++o) fids[o] = fun_ids[o][sel[o]];
      for (std::uint32_t a = 0; a < n1; ++a) {
        const FinCategory& kd = *h.obs[g.one_cells[a].tgt];
        std::vector<std::string> parts(fill[a].size());
        for (std::size_t x = 0; x < fill[a].size(); ++x) parts[x] = kd.mor_id(fill[a][x]);
        tids[a] = enc_tuple(parts);
      }
      oids.push_back(enc_call("pnat", {{"F", enc_tuple(fids)}, {"th", enc_tuple(tids)}}));
      objs.push_back({sel, std::move(fill)});
      meter.check_objects(oids.size(), "pseudonatural enumeration");
    });
  });

  // modifications, bucketed per ordered pair of pseudonatural transformations
  const auto nobj = static_cast<std::uint32_t>(objs.size());
  if (static_cast<std::uint64_t>(nobj) * nobj > meter.limits.candidates)
    throw resource_error("candidate budget exceeded in modification enumeration");
  std::vector<std::uint32_t> off0(ng + 1, 0);
  for (std::uint32_t o = 0; o < ng; ++o) off0[o + 1] = off0[o] + w.obs[o]->n_objects();
  const std::uint32_t nax = off0[ng];

  std::vector<TupleBucket> buckets(static_cast<std::size_t>(nobj) * nobj);
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<std::array<std::uint32_t, 2>> ends;
  for (std::uint32_t i = 0; i < nobj; ++i) {
    for (std::uint32_t j = 0; j < nobj; ++j) {
      TupleBucket& b = buckets[static_cast<std::size_t>(i) * nobj + j];
      b.base = static_cast<std::uint32_t>(comps.size());
      b.cands.resize(nax);
      std::vector<std::size_t> sizes(nax);
      for (std::uint32_t o = 0; o < ng; ++o) {
        const FinFunctor& fi = out.functors[o][objs[i].sel[o]];
        const FinFunctor& fj = out.functors[o][objs[j].sel[o]];
        for (std::uint32_t x = 0; x < w.obs[o]->n_objects(); ++x) {
          b.cands[off0[o] + x] = &h.obs[o]->hom(fi.omap[x], fj.omap[x]);
          sizes[off0[o] + x] = b.cands[off0[o] + x]->size();
        }
      }
      b.strides = suffix_strides(sizes);
      std::uint64_t next_rank = 0;
      std::vector<std::uint32_t> at(nax);
      odometer_pos(sizes, [&](const std::vector<std::size_t>& pos) {
        meter.spend(1, "modification enumeration");
        const std::uint64_t rk = next_rank++;
        for (std::uint32_t ax = 0; ax < nax; ++ax) at[ax] = (*b.cands[ax])[pos[ax]];
        for (std::uint32_t o = 0; o < ng; ++o) {
          const FinFunctor& fi = out.functors[o][objs[i].sel[o]];
          const FinFunctor& fj = out.functors[o][objs[j].sel[o]];
          const FinCategory& ko = *h.obs[o];
          for (std::uint32_t u : wnonid[o])
            if (ko.compose(fj.mmap[u], at[off0[o] + w.obs[o]->src(u)]) !=
                ko.compose(at[off0[o] + w.obs[o]->tgt(u)], fi.mmap[u]))
              return;
        }
        for (std::uint32_t a : nonid) {
          const OneCell& cell = g.one_cells[a];
          const FinCategory& kd = *h.obs[cell.tgt];
          for (std::uint32_t x = 0; x < w.obs[cell.src]->n_objects(); ++x)
            if (kd.compose(at[off0[cell.tgt] + w.ones[a].omap[x]], objs[i].fill[a][x]) !=
                kd.compose(objs[j].fill[a][x], h.ones[a].mmap[at[off0[cell.src] + x]]))
              return;
        }
        b.kept.push_back(rk);
        comps.push_back(at);
        ends.push_back({i, j});
        meter.check_morphisms(comps.size(), "modification enumeration");
      });
    }
  }

  AssembleInput ai;
  ai.name = "wpsd(" + g.name + ")";
  ai.prov = Provenance{"weighted-pseudolimit",
                       {{"W", two_functor_digest_hex(w)}, {"H", two_functor_digest_hex(h)}}};
  ai.objects = oids;
  std::vector<std::string> mids(comps.size());
  ai.morphisms.reserve(comps.size());
  for (std::uint32_t m = 0; m < comps.size(); ++m) {
    std::vector<std::string> per_obj(ng);
    for (std::uint32_t o = 0; o < ng; ++o) {
      std::vector<std::string> parts(w.obs[o]->n_objects());
      for (std::uint32_t x = 0; x < parts.size(); ++x)
        parts[x] = h.obs[o]->mor_id(comps[m][off0[o] + x]);
      per_obj[o] = enc_tuple(parts);
    }
    mids[m] = enc_call("mod", {{"src", oids[ends[m][0]]},
                               {"tgt", oids[ends[m][1]]},
                               {"at", enc_tuple(per_obj)}});
    ai.morphisms.push_back({mids[m], ends[m][0], ends[m][1]});
  }

  ai.identity.resize(nobj);
  for (std::uint32_t i = 0; i < nobj; ++i) {
    const TupleBucket& b = buckets[static_cast<std::size_t>(i) * nobj + i];
    std::vector<std::uint32_t> at(nax);
    for (std::uint32_t o = 0; o < ng; ++o) {
      const FinFunctor& fi = out.functors[o][objs[i].sel[o]];
      for (std::uint32_t x = 0; x < w.obs[o]->n_objects(); ++x)
        at[off0[o] + x] = h.obs[o]->identity[fi.omap[x]];
    }
    ai.identity[i] =
        bucket_find(b, bucket_rank(b, at), "weighted: identity modification not enumerated");
  }

  std::uint64_t n_comp = 0;
  std::vector<std::uint32_t> at(nax);
  for (std::uint32_t i = 0; i < nobj; ++i)
    for (std::uint32_t j = 0; j < nobj; ++j) {
      const TupleBucket& b1 = buckets[static_cast<std::size_t>(i) * nobj + j];
      if (b1.kept.empty()) continue;
      for (std::uint32_t k = 0; k < nobj; ++k) {
        const TupleBucket& b2 = buckets[static_cast<std::size_t>(j) * nobj + k];
        if (b2.kept.empty()) continue;
        const TupleBucket& b3 = buckets[static_cast<std::size_t>(i) * nobj + k];
        const auto e1 = b1.base + static_cast<std::uint32_t>(b1.kept.size());
        const auto e2 = b2.base + static_cast<std::uint32_t>(b2.kept.size());
        for (std::uint32_t m1 = b1.base; m1 < e1; ++m1)
          for (std::uint32_t m2 = b2.base; m2 < e2; ++m2) {
            meter.spend(1, "weighted composition");
            ++n_comp;
            meter.check_comp(n_comp, "weighted composition");
            for (std::uint32_t o = 0; o < ng; ++o)
              for (std::uint32_t x = 0; x < w.obs[o]->n_objects(); ++x)
                at[off0[o] + x] =
                    h.obs[o]->compose(comps[m2][off0[o] + x], comps[m1][off0[o] + x]);
            ai.comp.push_back({m2, m1, bucket_find(b3, bucket_rank(b3, at),
                                                   "weighted: composite modification not enumerated")});
          }
      }
    }

  out.cat = assemble_category(std::move(ai), &meter);
  out.functor_at.resize(nobj);
  out.filler.resize(nobj);
  out.component.resize(comps.size());
  for (std::uint32_t i = 0; i < nobj; ++i) {
    const std::uint32_t n = out.cat->object_index(oids[i]);
    out.functor_at[n] = std::move(objs[i].sel);
    std::vector<std::uint32_t> flat;
    for (std::uint32_t a = 0; a < n1; ++a)
      flat.insert(flat.end(), objs[i].fill[a].begin(), objs[i].fill[a].end());
    out.filler[n] = std::move(flat);
  }
  for (std::uint32_t m = 0; m < comps.size(); ++m)
    out.component[out.cat->morphism_index(mids[m])] = std::move(comps[m]);
  return out;
}

}  // namespace pielim
