#include "pielim/setdiag.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace pielim {

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

}  // namespace

SetDiagram make_set_diagram(
    const CatPtr& shape,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& sets,
    const std::vector<std::pair<std::string,
                                std::vector<std::pair<std::string, std::string>>>>& maps) {
  SetDiagram d;
  d.shape = shape;
  d.elems.resize(shape->n_objects());
  d.maps.resize(shape->n_morphisms());

  std::vector<bool> have(shape->n_objects(), false);
  for (const auto& [obj, elems] : sets) {
    std::uint32_t o = shape->object_index(obj);
    if (have[o]) throw input_error("set diagram: duplicate set for " + obj);
    have[o] = true;
    auto sorted = elems;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw input_error("set diagram: duplicate element label at " + obj);
    d.elems[o] = std::move(sorted);
  }
  for (std::uint32_t o = 0; o < shape->n_objects(); ++o)
    if (!have[o]) throw input_error("set diagram: missing set for " + shape->obj_id(o));

  std::vector<bool> have_m(shape->n_morphisms(), false);
  for (const auto& [mor, table] : maps) {
    std::uint32_t m = shape->morphism_index(mor);
    if (have_m[m]) throw input_error("set diagram: duplicate map for " + mor);
    have_m[m] = true;
    const auto& se = d.elems[shape->src(m)];
    const auto& te = d.elems[shape->tgt(m)];
    std::vector<std::uint32_t> tab(se.size(), 0);
    std::vector<bool> got(se.size(), false);
    for (const auto& [from, to] : table) {
      auto fit = std::lower_bound(se.begin(), se.end(), from);
      if (fit == se.end() || *fit != from)
        throw input_error("set diagram: map " + mor + " mentions unknown element " + from);
      auto tit = std::lower_bound(te.begin(), te.end(), to);
      if (tit == te.end() || *tit != to)
        throw input_error("set diagram: map " + mor + " targets unknown element " + to);
      std::size_t fi = static_cast<std::size_t>(fit - se.begin());
      if (got[fi]) throw input_error("set diagram: map " + mor + " doubly defined at " + from);
      got[fi] = true;
      tab[fi] = static_cast<std::uint32_t>(tit - te.begin());
    }
    for (std::size_t i = 0; i < se.size(); ++i)
      if (!got[i])
        throw input_error("set diagram: map " + mor + " undefined at element " + se[i]);
    d.maps[m] = std::move(tab);
  }
  for (std::uint32_t m = 0; m < shape->n_morphisms(); ++m)
    if (!have_m[m]) throw input_error("set diagram: missing map for " + shape->mor_id(m));

  return d;
}

ValidationReport validate_set_diagram(const SetDiagram& d) {
  ValidationReport rep;
  const FinCategory& c = *d.shape;
  for (std::uint32_t o = 0; o < c.n_objects(); ++o) {
    const auto& tab = d.maps[c.identity[o]];
    for (std::uint32_t i = 0; i < tab.size(); ++i)
      if (tab[i] != i) {
        rep.add("diagram-identity", {c.obj_id(o), d.elems[o][i]});
        break;
      }
  }
  for (const auto& [key, gf] : c.comp) {
    std::uint32_t g = static_cast<std::uint32_t>(key >> 32);
    std::uint32_t f = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (c.tgt(f) != c.src(g)) continue;
    const auto& tf = d.maps[f];
    const auto& tg = d.maps[g];
    const auto& tgf = d.maps[gf];
    for (std::uint32_t i = 0; i < tf.size(); ++i)
      if (tg[tf[i]] != tgf[i]) {
        rep.add("diagram-composition", {c.mor_id(g), c.mor_id(f)});
        break;
      }
  }
  return rep;
}

Cocone colimit_set_diagram(const SetDiagram& d) {
  const FinCategory& c = *d.shape;
  std::vector<std::uint32_t> offset(c.n_objects() + 1, 0);
  for (std::uint32_t o = 0; o < c.n_objects(); ++o)
    offset[o + 1] = offset[o] + static_cast<std::uint32_t>(d.elems[o].size());
  std::uint32_t total = offset[c.n_objects()];

  UnionFind uf(total);
  for (std::uint32_t m = 0; m < c.n_morphisms(); ++m) {
    std::uint32_t s = c.src(m), t = c.tgt(m);
    for (std::uint32_t i = 0; i < d.maps[m].size(); ++i)
      uf.unite(offset[s] + i, offset[t] + d.maps[m][i]);
  }

  // label classes by their least member tag
  std::vector<std::string> tag(total);
  for (std::uint32_t o = 0; o < c.n_objects(); ++o)
    for (std::uint32_t i = 0; i < d.elems[o].size(); ++i)
      tag[offset[o] + i] = c.obj_id(o) + "." + d.elems[o][i];

  std::map<std::uint32_t, std::string> label;  // root -> least tag
  for (std::uint32_t x = 0; x < total; ++x) {
    std::uint32_t r = uf.find(x);
    auto it = label.find(r);
    if (it == label.end() || tag[x] < it->second) label[r] = tag[x];
  }

  Cocone out;
  std::map<std::string, std::uint32_t> class_ix;
  for (const auto& [root, lbl] : label) out.apex.push_back("[" + lbl + "]");
  std::sort(out.apex.begin(), out.apex.end());
  for (std::uint32_t i = 0; i < out.apex.size(); ++i) class_ix[out.apex[i]] = i;

  out.legs.resize(c.n_objects());
  for (std::uint32_t o = 0; o < c.n_objects(); ++o) {
    out.legs[o].resize(d.elems[o].size());
    for (std::uint32_t i = 0; i < d.elems[o].size(); ++i)
      out.legs[o][i] = class_ix.at("[" + label.at(uf.find(offset[o] + i)) + "]");
  }
  return out;
}

FilteredCheck is_filtered(const FinCategory& c) {
  FilteredCheck out;
  if (c.n_objects() == 0) {
    out.witness = FilteredWitness{"empty", {}};
    return out;
  }
  // binary cospans, objects scanned in canonical order
  for (std::uint32_t x = 0; x < c.n_objects(); ++x) {
    for (std::uint32_t y = x; y < c.n_objects(); ++y) {
      bool found = false;
      for (std::uint32_t z = 0; z < c.n_objects() && !found; ++z)
        if (!c.hom(x, z).empty() && !c.hom(y, z).empty()) found = true;
      if (!found) {
        out.witness = FilteredWitness{"no-cospan", {c.obj_id(x), c.obj_id(y)}};
        return out;
      }
    }
  }
  // coequalizing morphisms for parallel pairs
  for (std::uint32_t f = 0; f < c.n_morphisms(); ++f) {
    for (std::uint32_t g = f + 1; g < c.n_morphisms(); ++g) {
      if (c.src(f) != c.src(g) || c.tgt(f) != c.tgt(g)) continue;
      bool found = false;
      std::uint32_t y = c.tgt(f);
      for (std::uint32_t z = 0; z < c.n_objects() && !found; ++z)
        for (std::uint32_t h : c.hom(y, z))
          if (c.compose(h, f) == c.compose(h, g)) {
            found = true;
            break;
          }
      if (!found) {
        out.witness = FilteredWitness{"no-coequalizer", {c.mor_id(f), c.mor_id(g)}};
        return out;
      }
    }
  }
  out.filtered = true;
  return out;
}

PresentationContext make_context(const CatPtr& category,
                                 const std::vector<std::string>& small_objects) {
  PresentationContext ctx;
  ctx.category = category;
  for (const auto& id : small_objects)
    ctx.small_objects.push_back(category->object_index(id));
  std::sort(ctx.small_objects.begin(), ctx.small_objects.end());
  ctx.small_objects.erase(std::unique(ctx.small_objects.begin(), ctx.small_objects.end()),
                          ctx.small_objects.end());
  if (ctx.small_objects.empty())
    throw input_error("presentation context: empty small-object designation");
  return ctx;
}

PresentationContext full_context(const CatPtr& category) {
  PresentationContext ctx;
  ctx.category = category;
  ctx.small_objects.resize(category->n_objects());
  std::iota(ctx.small_objects.begin(), ctx.small_objects.end(), 0u);
  return ctx;
}

CanonicalDiagram canonical_diagram(const PresentationContext& ctx, const std::string& k,
                                   const Budget& budget) {
  BudgetMeter meter(budget);
  const FinCategory& c = *ctx.category;
  std::uint32_t ko = c.object_index(k);

  std::vector<bool> small(c.n_objects(), false);
  for (std::uint32_t o : ctx.small_objects) small[o] = true;

  // objects of the diagram: morphisms v with small source and target k
  std::vector<std::uint32_t> objs;
  for (std::uint32_t m = 0; m < c.n_morphisms(); ++m)
    if (c.tgt(m) == ko && small[c.src(m)]) objs.push_back(m);
  meter.check_objects(objs.size(), "canonical diagram");

  FinCategoryBuilder bld("canonical(" + k + ")");
  for (std::uint32_t v : objs) bld.object(c.mor_id(v));

  auto tri = [&](std::uint32_t a, std::uint32_t v, std::uint32_t w) {
    return enc_call("tri", {{"a", c.mor_id(a)}, {"src", c.mor_id(v)}, {"tgt", c.mor_id(w)}});
  };

  // triangles a: v -> w with w . a = v
  std::uint64_t n_mor = 0;
  std::unordered_map<std::string, std::uint32_t> underlying;
  for (std::uint32_t v : objs) {
    for (std::uint32_t w : objs) {
      for (std::uint32_t a : c.hom(c.src(v), c.src(w))) {
        if (c.compose(w, a) == v) {
          std::string id = tri(a, v, w);
          underlying[id] = a;
          bld.morphism(id, c.mor_id(v), c.mor_id(w));
          ++n_mor;
        }
      }
    }
  }
  meter.check_morphisms(n_mor, "canonical diagram");

  for (std::uint32_t v : objs) bld.identity(c.mor_id(v), tri(c.identity[c.src(v)], v, v));

  for (std::uint32_t v : objs)
    for (std::uint32_t w : objs)
      for (std::uint32_t a : c.hom(c.src(v), c.src(w))) {
        if (c.compose(w, a) != v) continue;
        for (std::uint32_t u : objs)
          for (std::uint32_t b : c.hom(c.src(w), c.src(u)))
            if (c.compose(u, b) == w)
              bld.compose_rule(tri(b, w, u), tri(a, v, w), tri(c.compose(b, a), v, u));
      }

  CanonicalDiagram out;
  out.diagram = bld.build(&meter);

  out.object_of.resize(out.diagram->n_objects());
  FinFunctor d;
  d.source = out.diagram;
  d.target = ctx.category;
  d.omap.resize(out.diagram->n_objects());
  d.mmap.resize(out.diagram->n_morphisms());
  for (std::uint32_t i = 0; i < out.diagram->n_objects(); ++i) {
    std::uint32_t v = c.morphism_index(out.diagram->obj_id(i));
    out.object_of[i] = v;
    d.omap[i] = c.src(v);
  }
  for (std::uint32_t i = 0; i < out.diagram->n_morphisms(); ++i)
    d.mmap[i] = underlying.at(out.diagram->mor_id(i));
  out.to_ambient = std::move(d);
  return out;
}

CofinalCheck is_cofinal(const FinFunctor& delta) {
  CofinalCheck out;
  const FinCategory& s = *delta.source;
  const FinCategory& t = *delta.target;

  for (std::uint32_t w = 0; w < t.n_objects(); ++w) {
    // comma objects: pairs (v, f: w -> delta(v))
    std::vector<std::pair<std::uint32_t, std::uint32_t>> nodes;
    for (std::uint32_t v = 0; v < s.n_objects(); ++v)
      for (std::uint32_t f : t.hom(w, delta.omap[v])) nodes.emplace_back(v, f);

    if (nodes.empty()) {
      out.witness = CofinalWitness{t.obj_id(w), "empty-comma", {}};
      return out;
    }

    UnionFind uf(nodes.size());
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> node_ix;
    for (std::uint32_t i = 0; i < nodes.size(); ++i) node_ix[nodes[i]] = i;
    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
      auto [v, f] = nodes[i];
      for (std::uint32_t a = 0; a < s.n_morphisms(); ++a) {
        if (s.src(a) != v) continue;
        std::uint32_t v2 = s.tgt(a);
        std::uint32_t f2 = t.compose(delta.mmap[a], f);
        uf.unite(i, node_ix.at({v2, f2}));
      }
    }
    std::uint32_t root = uf.find(0);
    for (std::uint32_t i = 1; i < nodes.size(); ++i) {
      if (uf.find(i) != root) {
        auto desc = [&](std::uint32_t n) {
          return "(" + s.obj_id(nodes[n].first) + "," + t.mor_id(nodes[n].second) + ")";
        };
        out.witness = CofinalWitness{t.obj_id(w), "disconnected-comma", {desc(0), desc(i)}};
        return out;
      }
    }
  }
  out.cofinal = true;
  return out;
}

bool cofinal_condition_a(const FinFunctor& delta) {
  const FinCategory& s = *delta.source;
  const FinCategory& t = *delta.target;
  for (std::uint32_t w = 0; w < t.n_objects(); ++w) {
    bool found = false;
    for (std::uint32_t v = 0; v < s.n_objects() && !found; ++v)
      if (!t.hom(w, delta.omap[v]).empty()) found = true;
    if (!found) return false;
  }
  return true;
}

bool is_fully_faithful(const FinFunctor& f) {
  const FinCategory& s = *f.source;
  const FinCategory& t = *f.target;
  for (std::uint32_t x = 0; x < s.n_objects(); ++x) {
    for (std::uint32_t y = 0; y < s.n_objects(); ++y) {
      const auto& h = s.hom(x, y);
      const auto& th = t.hom(f.omap[x], f.omap[y]);
      if (h.size() != th.size()) return false;
      std::vector<std::uint32_t> images;
      for (std::uint32_t m : h) images.push_back(f.mmap[m]);
      std::sort(images.begin(), images.end());
      if (std::adjacent_find(images.begin(), images.end()) != images.end()) return false;
      // same size and injective into the hom set means bijective
      for (std::uint32_t m : images)
        if (t.src(m) != f.omap[x] || t.tgt(m) != f.omap[y]) return false;
    }
  }
  return true;
}

}  // namespace pielim
