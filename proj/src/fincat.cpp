#include "pielim/fincat.hpp"

#include <algorithm>
#include <set>

namespace pielim {

std::uint32_t FinCategory::object_index(const std::string& id) const {
  auto it = obj_ix.find(id);
  if (it == obj_ix.end()) throw input_error("unknown object id: " + id);
  return it->second;
}

std::uint32_t FinCategory::morphism_index(const std::string& id) const {
  auto it = mor_ix.find(id);
  if (it == mor_ix.end()) throw input_error("unknown morphism id: " + id);
  return it->second;
}

std::optional<std::uint32_t> FinCategory::find_object(const std::string& id) const {
  auto it = obj_ix.find(id);
  if (it == obj_ix.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> FinCategory::find_morphism(const std::string& id) const {
  auto it = mor_ix.find(id);
  if (it == mor_ix.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> FinCategory::compose_opt(std::uint32_t g, std::uint32_t f) const {
  std::uint64_t key = pair_key(g, f);
  auto it = std::lower_bound(comp.begin(), comp.end(), key,
                             [](const std::pair<std::uint64_t, std::uint32_t>& e,
                                std::uint64_t k) { return e.first < k; });
  if (it == comp.end() || it->first != key) return std::nullopt;
  return it->second;
}

std::uint32_t FinCategory::compose(std::uint32_t g, std::uint32_t f) const {
  auto r = compose_opt(g, f);
  if (!r)
    throw input_error("composition undefined for (" + mor_id(g) + ", " + mor_id(f) + ")");
  return *r;
}

const std::vector<std::uint32_t>& FinCategory::hom(std::uint32_t x, std::uint32_t y) const {
  static const std::vector<std::uint32_t> empty;
  auto it = homs.find(pair_key(x, y));
  return it == homs.end() ? empty : it->second;
}

std::optional<std::uint32_t> FinCategory::inverse(std::uint32_t m) const {
  std::uint32_t x = src(m), y = tgt(m);
  for (std::uint32_t n : hom(y, x)) {
    auto a = compose_opt(n, m);
    auto b = compose_opt(m, n);
    if (a && *a == identity[x] && b && *b == identity[y]) return n;
  }
  return std::nullopt;
}

bool FinCategory::structurally_equal(const FinCategory& other) const {
  if (objects != other.objects) return false;
  if (identity != other.identity) return false;
  if (comp != other.comp) return false;
  if (morphisms.size() != other.morphisms.size()) return false;
  for (std::size_t i = 0; i < morphisms.size(); ++i) {
    const MorRec& a = morphisms[i];
    const MorRec& b = other.morphisms[i];
    if (a.id != b.id || a.src != b.src || a.tgt != b.tgt) return false;
  }
  return true;
}

std::uint64_t FinCategory::digest() const {
  if (digest_ready_) return digest_cache_;
  Digest d;
  d.feed("fincat");
  for (const auto& o : objects) d.feed(o);
  d.feed("|");
  for (const auto& m : morphisms) {
    d.feed(m.id);
    d.feed(objects[m.src]);
    d.feed(objects[m.tgt]);
  }
  d.feed("|");
  for (std::uint32_t i : identity) d.feed(morphisms[i].id);
  d.feed("|");
  for (const auto& [key, gf] : comp) {
    d.feed(morphisms[key >> 32].id);
    d.feed(morphisms[key & 0xffffffffu].id);
    d.feed(morphisms[gf].id);
  }
  digest_cache_ = d.value();
  digest_ready_ = true;
  return digest_cache_;
}

std::string FinCategory::digest_hex() const {
  Digest d;
  d.state = digest();
  return d.hex();
}

bool same_category(const CatPtr& a, const CatPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->digest() == b->digest() && a->structurally_equal(*b);
}

FinCategoryBuilder& FinCategoryBuilder::object(const std::string& id) {
  objects_.push_back(id);
  return *this;
}

FinCategoryBuilder& FinCategoryBuilder::morphism(const std::string& id, const std::string& src,
                                                 const std::string& tgt) {
  morphisms_.push_back({id, src, tgt});
  return *this;
}

FinCategoryBuilder& FinCategoryBuilder::identity(const std::string& obj,
                                                 const std::string& mor) {
  identities_.emplace_back(obj, mor);
  return *this;
}

FinCategoryBuilder& FinCategoryBuilder::compose_rule(const std::string& g, const std::string& f,
                                                     const std::string& gf) {
  comps_.push_back({g, f, gf});
  return *this;
}

FinCategoryBuilder& FinCategoryBuilder::provenance(Provenance p) {
  provenance_ = std::move(p);
  return *this;
}

CatPtr FinCategoryBuilder::build(const BudgetMeter* meter) const {
  auto cat = std::make_shared<FinCategory>();
  cat->name = name_;
  cat->provenance = provenance_;

  cat->objects = objects_;
  std::sort(cat->objects.begin(), cat->objects.end());
  for (std::size_t i = 1; i < cat->objects.size(); ++i)
    if (cat->objects[i] == cat->objects[i - 1])
      throw input_error("duplicate object id: " + cat->objects[i]);
  for (std::uint32_t i = 0; i < cat->objects.size(); ++i) cat->obj_ix[cat->objects[i]] = i;

  if (meter) {
    meter->check_objects(cat->objects.size(), "category build");
    meter->check_morphisms(morphisms_.size(), "category build");
    meter->check_comp(comps_.size(), "category build");
  }

  std::vector<std::array<std::string, 3>> mors = morphisms_;
  std::sort(mors.begin(), mors.end(),
            [](const auto& a, const auto& b) { return a[0] < b[0]; });
  cat->morphisms.reserve(mors.size());
  for (const auto& m : mors) {
    if (!cat->morphisms.empty() && cat->morphisms.back().id == m[0])
      throw input_error("duplicate morphism id: " + m[0]);
    auto s = cat->obj_ix.find(m[1]);
    auto t = cat->obj_ix.find(m[2]);
    if (s == cat->obj_ix.end()) throw input_error("morphism " + m[0] + ": unknown src " + m[1]);
    if (t == cat->obj_ix.end()) throw input_error("morphism " + m[0] + ": unknown tgt " + m[2]);
    cat->morphisms.push_back({m[0], s->second, t->second});
  }
  for (std::uint32_t i = 0; i < cat->morphisms.size(); ++i)
    cat->mor_ix[cat->morphisms[i].id] = i;

  cat->identity.assign(cat->objects.size(), 0);
  std::vector<bool> have_id(cat->objects.size(), false);
  for (const auto& [obj, mor] : identities_) {
    auto o = cat->obj_ix.find(obj);
    if (o == cat->obj_ix.end()) throw input_error("identity entry: unknown object " + obj);
    auto m = cat->mor_ix.find(mor);
    if (m == cat->mor_ix.end()) throw input_error("identity entry: unknown morphism " + mor);
    if (have_id[o->second])
      throw input_error("duplicate identity entry for object " + obj);
    cat->identity[o->second] = m->second;
    have_id[o->second] = true;
  }
  for (std::uint32_t i = 0; i < cat->objects.size(); ++i)
    if (!have_id[i]) throw input_error("missing identity entry for object " + cat->objects[i]);

  cat->comp.reserve(comps_.size());
  for (const auto& c : comps_) {
    auto g = cat->mor_ix.find(c[0]);
    auto f = cat->mor_ix.find(c[1]);
    auto gf = cat->mor_ix.find(c[2]);
    if (g == cat->mor_ix.end()) throw input_error("composition entry: unknown morphism " + c[0]);
    if (f == cat->mor_ix.end()) throw input_error("composition entry: unknown morphism " + c[1]);
    if (gf == cat->mor_ix.end())
      throw input_error("composition entry: unknown morphism " + c[2]);
    cat->comp.emplace_back(pair_key(g->second, f->second), gf->second);
  }
  std::sort(cat->comp.begin(), cat->comp.end());
  for (std::size_t i = 1; i < cat->comp.size(); ++i)
    if (cat->comp[i].first == cat->comp[i - 1].first &&
        cat->comp[i].second != cat->comp[i - 1].second)
      throw input_error("conflicting composition entries for one pair");
  cat->comp.erase(std::unique(cat->comp.begin(), cat->comp.end()), cat->comp.end());

  for (std::uint32_t m = 0; m < cat->morphisms.size(); ++m)
    cat->homs[pair_key(cat->morphisms[m].src, cat->morphisms[m].tgt)].push_back(m);

  return cat;
}

CatPtr assemble_category(AssembleInput in, const BudgetMeter* meter) {
  if (meter) {
    meter->check_objects(in.objects.size(), "category assembly");
    meter->check_morphisms(in.morphisms.size(), "category assembly");
    meter->check_comp(in.comp.size(), "category assembly");
  }
  if (in.identity.size() != in.objects.size())
    throw input_error("assembly: one identity entry per object required");

  auto cat = std::make_shared<FinCategory>();
  cat->name = std::move(in.name);
  cat->provenance = std::move(in.prov);

  std::vector<std::uint32_t> operm(in.objects.size());  // old index -> new index
  {
    std::vector<std::uint32_t> order(in.objects.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return in.objects[a] < in.objects[b];
    });
    cat->objects.resize(in.objects.size());
    for (std::uint32_t n = 0; n < order.size(); ++n) {
      cat->objects[n] = std::move(in.objects[order[n]]);
      operm[order[n]] = n;
    }
  }
  for (std::size_t i = 1; i < cat->objects.size(); ++i)
    if (cat->objects[i] == cat->objects[i - 1])
      throw input_error("duplicate object id: " + cat->objects[i]);
  for (std::uint32_t i = 0; i < cat->objects.size(); ++i) cat->obj_ix[cat->objects[i]] = i;

  std::vector<std::uint32_t> mperm(in.morphisms.size());
  {
    std::vector<std::uint32_t> order(in.morphisms.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return in.morphisms[a].id < in.morphisms[b].id;
    });
    cat->morphisms.resize(in.morphisms.size());
    for (std::uint32_t n = 0; n < order.size(); ++n) {
      MorRec& m = in.morphisms[order[n]];
      if (m.src >= in.objects.size() || m.tgt >= in.objects.size())
        throw input_error("assembly: morphism endpoint index out of range");
      cat->morphisms[n] = {std::move(m.id), operm[m.src], operm[m.tgt]};
      mperm[order[n]] = n;
    }
  }
  for (std::size_t i = 1; i < cat->morphisms.size(); ++i)
    if (cat->morphisms[i].id == cat->morphisms[i - 1].id)
      throw input_error("duplicate morphism id: " + cat->morphisms[i].id);
  for (std::uint32_t i = 0; i < cat->morphisms.size(); ++i)
    cat->mor_ix[cat->morphisms[i].id] = i;

  cat->identity.resize(in.objects.size());
  for (std::uint32_t o = 0; o < in.identity.size(); ++o) {
    if (in.identity[o] >= in.morphisms.size())
      throw input_error("assembly: identity index out of range");
    cat->identity[operm[o]] = mperm[in.identity[o]];
  }

  cat->comp.reserve(in.comp.size());
  for (const auto& c : in.comp) {
    if (c[0] >= in.morphisms.size() || c[1] >= in.morphisms.size() ||
        c[2] >= in.morphisms.size())
      throw input_error("assembly: composition index out of range");
    cat->comp.emplace_back(pair_key(mperm[c[0]], mperm[c[1]]), mperm[c[2]]);
  }
  std::sort(cat->comp.begin(), cat->comp.end());
  for (std::size_t i = 1; i < cat->comp.size(); ++i)
    if (cat->comp[i].first == cat->comp[i - 1].first &&
        cat->comp[i].second != cat->comp[i - 1].second)
      throw input_error("conflicting composition entries for one pair");
  cat->comp.erase(std::unique(cat->comp.begin(), cat->comp.end()), cat->comp.end());

  for (std::uint32_t m = 0; m < cat->morphisms.size(); ++m)
    cat->homs[pair_key(cat->morphisms[m].src, cat->morphisms[m].tgt)].push_back(m);

  return cat;
}

ValidationReport validate_category(const FinCategory& c) {
  ValidationReport rep;

  for (std::uint32_t o = 0; o < c.n_objects(); ++o) {
    std::uint32_t i = c.identity[o];
    if (c.src(i) != o || c.tgt(i) != o)
      rep.add("identity-shape", {c.obj_id(o), c.mor_id(i)});
  }

  // composition defined exactly on composable pairs, with correct boundaries
  for (const auto& [key, gf] : c.comp) {
    std::uint32_t g = static_cast<std::uint32_t>(key >> 32);
    std::uint32_t f = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (c.tgt(f) != c.src(g)) {
      rep.add("composition-on-noncomposable", {c.mor_id(g), c.mor_id(f)});
      continue;
    }
    if (c.src(gf) != c.src(f) || c.tgt(gf) != c.tgt(g))
      rep.add("composition-boundary", {c.mor_id(g), c.mor_id(f), c.mor_id(gf)});
  }
  for (std::uint32_t f = 0; f < c.n_morphisms(); ++f) {
    std::uint32_t y = c.tgt(f);
    for (std::uint32_t z = 0; z < c.n_objects(); ++z) {
      for (std::uint32_t g : c.hom(y, z)) {
        if (!c.compose_opt(g, f))
          rep.add("composition-missing", {c.mor_id(g), c.mor_id(f)});
      }
    }
  }

  // unit laws
  for (std::uint32_t f = 0; f < c.n_morphisms(); ++f) {
    auto r = c.compose_opt(f, c.identity[c.src(f)]);
    if (r && *r != f) rep.add("right-unit", {c.mor_id(f)});
    auto l = c.compose_opt(c.identity[c.tgt(f)], f);
    if (l && *l != f) rep.add("left-unit", {c.mor_id(f)});
  }

  // associativity on all composable triples
  for (std::uint32_t f = 0; f < c.n_morphisms(); ++f) {
    std::uint32_t y = c.tgt(f);
    for (std::uint32_t z = 0; z < c.n_objects(); ++z) {
      for (std::uint32_t g : c.hom(y, z)) {
        auto gf = c.compose_opt(g, f);
        if (!gf) continue;
        for (std::uint32_t w = 0; w < c.n_objects(); ++w) {
          for (std::uint32_t h : c.hom(z, w)) {
            auto hg = c.compose_opt(h, g);
            if (!hg) continue;
            auto a = c.compose_opt(h, *gf);
            auto b = c.compose_opt(*hg, f);
            if (a && b && *a != *b)
              rep.add("associativity", {c.mor_id(h), c.mor_id(g), c.mor_id(f)});
          }
        }
      }
    }
  }

  return rep;
}

FinFunctor identity_functor(const CatPtr& c) {
  FinFunctor f;
  f.source = c;
  f.target = c;
  f.omap.resize(c->n_objects());
  f.mmap.resize(c->n_morphisms());
  for (std::uint32_t i = 0; i < c->n_objects(); ++i) f.omap[i] = i;
  for (std::uint32_t i = 0; i < c->n_morphisms(); ++i) f.mmap[i] = i;
  return f;
}

FinFunctor constant_functor(const CatPtr& source, const CatPtr& target,
                            std::uint32_t target_obj) {
  FinFunctor f;
  f.source = source;
  f.target = target;
  f.omap.assign(source->n_objects(), target_obj);
  f.mmap.assign(source->n_morphisms(), target->identity[target_obj]);
  return f;
}

FinFunctor compose_functors(const FinFunctor& g, const FinFunctor& f) {
  if (!same_category(f.target, g.source))
    throw input_error("compose_functors: middle categories differ");
  FinFunctor h;
  h.source = f.source;
  h.target = g.target;
  h.omap.resize(f.omap.size());
  h.mmap.resize(f.mmap.size());
  for (std::size_t i = 0; i < f.omap.size(); ++i) h.omap[i] = g.omap[f.omap[i]];
  for (std::size_t i = 0; i < f.mmap.size(); ++i) h.mmap[i] = g.mmap[f.mmap[i]];
  return h;
}

FinFunctor make_functor(const CatPtr& source, const CatPtr& target,
                        const std::unordered_map<std::string, std::string>& on_objects,
                        const std::unordered_map<std::string, std::string>& on_morphisms) {
  FinFunctor f;
  f.source = source;
  f.target = target;
  f.omap.resize(source->n_objects());
  f.mmap.resize(source->n_morphisms());
  for (std::uint32_t i = 0; i < source->n_objects(); ++i) {
    auto it = on_objects.find(source->obj_id(i));
    if (it == on_objects.end())
      throw input_error("functor: missing object image for " + source->obj_id(i));
    f.omap[i] = target->object_index(it->second);
  }
  for (std::uint32_t i = 0; i < source->n_morphisms(); ++i) {
    auto it = on_morphisms.find(source->mor_id(i));
    if (it == on_morphisms.end())
      throw input_error("functor: missing morphism image for " + source->mor_id(i));
    f.mmap[i] = target->morphism_index(it->second);
  }
  return f;
}

ValidationReport validate_functor(const FinFunctor& f) {
  ValidationReport rep;
  const FinCategory& s = *f.source;
  const FinCategory& t = *f.target;

  for (std::uint32_t m = 0; m < s.n_morphisms(); ++m) {
    std::uint32_t im = f.mmap[m];
    if (t.src(im) != f.omap[s.src(m)] || t.tgt(im) != f.omap[s.tgt(m)])
      rep.add("functor-typing", {s.mor_id(m), t.mor_id(im)});
  }
  for (std::uint32_t o = 0; o < s.n_objects(); ++o) {
    if (f.mmap[s.identity[o]] != t.identity[f.omap[o]])
      rep.add("functor-identity", {s.obj_id(o)});
  }
  for (const auto& [key, gf] : s.comp) {
    std::uint32_t g = static_cast<std::uint32_t>(key >> 32);
    std::uint32_t fm = static_cast<std::uint32_t>(key & 0xffffffffu);
    if (s.tgt(fm) != s.src(g)) continue;  // reported by validate_category
    auto img = t.compose_opt(f.mmap[g], f.mmap[fm]);
    if (!img || *img != f.mmap[gf])
      rep.add("functor-composition", {s.mor_id(g), s.mor_id(fm)});
  }
  return rep;
}

bool functor_equal(const FinFunctor& a, const FinFunctor& b) {
  return same_category(a.source, b.source) && same_category(a.target, b.target) &&
         a.omap == b.omap && a.mmap == b.mmap;
}

bool functor_is_iso(const FinFunctor& f) {
  const FinCategory& s = *f.source;
  const FinCategory& t = *f.target;
  if (s.n_objects() != t.n_objects() || s.n_morphisms() != t.n_morphisms()) return false;
  std::vector<bool> oseen(t.n_objects(), false), mseen(t.n_morphisms(), false);
  for (std::uint32_t o : f.omap) {
    if (oseen[o]) return false;
    oseen[o] = true;
  }
  for (std::uint32_t m : f.mmap) {
    if (mseen[m]) return false;
    mseen[m] = true;
  }
  return true;
}

NatTransformation identity_nat(const FinFunctor& f) {
  NatTransformation n;
  n.source = f;
  n.target = f;
  n.component.resize(f.omap.size());
  for (std::size_t i = 0; i < f.omap.size(); ++i)
    n.component[i] = f.target->identity[f.omap[i]];
  return n;
}

NatTransformation vcompose_nat(const NatTransformation& beta, const NatTransformation& alpha) {
  if (!functor_equal(alpha.target, beta.source))
    throw input_error("vcompose_nat: middle functors differ");
  NatTransformation n;
  n.source = alpha.source;
  n.target = beta.target;
  n.component.resize(alpha.component.size());
  const FinCategory& t = *alpha.source.target;
  for (std::size_t i = 0; i < n.component.size(); ++i)
    n.component[i] = t.compose(beta.component[i], alpha.component[i]);
  return n;
}

NatTransformation hcompose_nat(const NatTransformation& beta, const NatTransformation& alpha) {
  // alpha: F => G : A -> B, beta: H => K : B -> C
  if (!same_category(alpha.source.target, beta.source.source))
    throw input_error("hcompose_nat: boundary categories differ");
  NatTransformation n;
  n.source = compose_functors(beta.source, alpha.source);
  n.target = compose_functors(beta.target, alpha.target);
  n.component.resize(alpha.component.size());
  const FinCategory& c = *beta.source.target;
  const FinFunctor& h = beta.source;
  for (std::size_t i = 0; i < n.component.size(); ++i) {
    // component at x: beta_{G x} after H(alpha_x)
    n.component[i] = c.compose(beta.component[alpha.target.omap[i]],
                               h.mmap[alpha.component[i]]);
  }
  return n;
}

NatTransformation make_nat(const FinFunctor& f, const FinFunctor& g,
                           const std::unordered_map<std::string, std::string>& components) {
  if (!same_category(f.source, g.source) || !same_category(f.target, g.target))
    throw input_error("natural transformation: functors are not parallel");
  NatTransformation n;
  n.source = f;
  n.target = g;
  n.component.resize(f.source->n_objects());
  for (std::uint32_t i = 0; i < f.source->n_objects(); ++i) {
    auto it = components.find(f.source->obj_id(i));
    if (it == components.end())
      throw input_error("natural transformation: missing component at " + f.source->obj_id(i));
    std::uint32_t m = f.target->morphism_index(it->second);
    if (f.target->src(m) != f.omap[i] || f.target->tgt(m) != g.omap[i])
      throw input_error("natural transformation: component at " + f.source->obj_id(i) +
                        " has wrong boundary");
    n.component[i] = m;
  }
  return n;
}

ValidationReport validate_nat_trans(const NatTransformation& n) {
  if (!same_category(n.source.source, n.target.source) ||
      !same_category(n.source.target, n.target.target))
    throw input_error("natural transformation: functors are not parallel");
  const FinCategory& a = *n.source.source;
  const FinCategory& b = *n.source.target;
  if (n.component.size() != a.n_objects())
    throw input_error("natural transformation: missing components");
  for (std::uint32_t i = 0; i < a.n_objects(); ++i) {
    std::uint32_t m = n.component[i];
    if (b.src(m) != n.source.omap[i] || b.tgt(m) != n.target.omap[i])
      throw input_error("natural transformation: component at " + a.obj_id(i) +
                        " has wrong boundary");
  }
  ValidationReport rep;
  for (std::uint32_t f = 0; f < a.n_morphisms(); ++f) {
    std::uint32_t x = a.src(f), y = a.tgt(f);
    std::uint32_t lhs = b.compose(n.component[y], n.source.mmap[f]);
    std::uint32_t rhs = b.compose(n.target.mmap[f], n.component[x]);
    if (lhs != rhs) rep.add("naturality", {a.mor_id(f)});
  }
  return rep;
}

bool nat_equal(const NatTransformation& a, const NatTransformation& b) {
  return functor_equal(a.source, b.source) && functor_equal(a.target, b.target) &&
         a.component == b.component;
}

ProductResult product_category(const std::vector<CatPtr>& factors, const Budget& budget) {
  BudgetMeter meter(budget);
  std::size_t k = factors.size();

  std::uint64_t n_obj = 1, n_mor = 1, n_comp = 1;
  for (const auto& f : factors) {
    n_obj *= f->n_objects();
    n_mor *= f->n_morphisms();
    n_comp *= f->comp.size();
    if (n_obj > budget.max_objects || n_mor > budget.max_morphisms ||
        n_comp > budget.max_comp_entries)
      throw resource_error("product category exceeds budget");
  }
  meter.check_objects(n_obj, "product");
  meter.check_morphisms(n_mor, "product");
  meter.check_comp(n_comp, "product");

  FinCategoryBuilder bld("product");

  // enumerate index tuples in lexicographic order of the encoded ids
  std::vector<std::vector<std::string>> obj_tuples;
  std::vector<std::uint32_t> cur(k, 0);
  std::vector<std::vector<std::uint32_t>> obj_ixs;

  // object tuples
  {
    std::vector<std::uint32_t> idx(k, 0);
    bool done = false;
    if (n_obj == 0) done = true;
    while (!done) {
      std::vector<std::string> parts(k);
      for (std::size_t i = 0; i < k; ++i) parts[i] = factors[i]->obj_id(idx[i]);
      bld.object(enc_tuple(parts));
      obj_ixs.push_back(idx);
      // advance
      std::size_t p = k;
      while (p > 0) {
        --p;
        if (++idx[p] < factors[p]->n_objects()) break;
        idx[p] = 0;
        if (p == 0) done = true;
      }
      if (k == 0) break;
    }
  }

  auto mor_tuple_id = [&](const std::vector<std::uint32_t>& idx) {
    std::vector<std::string> parts(k);
    for (std::size_t i = 0; i < k; ++i) parts[i] = factors[i]->mor_id(idx[i]);
    return enc_tuple(parts);
  };
  auto obj_tuple_id = [&](const std::vector<std::uint32_t>& idx) {
    std::vector<std::string> parts(k);
    for (std::size_t i = 0; i < k; ++i) parts[i] = factors[i]->obj_id(idx[i]);
    return enc_tuple(parts);
  };

  std::vector<std::vector<std::uint32_t>> mor_ixs;
  {
    std::vector<std::uint32_t> idx(k, 0);
    bool done = n_mor == 0;
    while (!done && k > 0) {
      std::vector<std::uint32_t> s(k), t(k);
      for (std::size_t i = 0; i < k; ++i) {
        s[i] = factors[i]->src(idx[i]);
        t[i] = factors[i]->tgt(idx[i]);
      }
      bld.morphism(mor_tuple_id(idx), obj_tuple_id(s), obj_tuple_id(t));
      mor_ixs.push_back(idx);
      std::size_t p = k;
      while (p > 0) {
        --p;
        if (++idx[p] < factors[p]->n_morphisms()) break;
        idx[p] = 0;
        if (p == 0) done = true;
      }
    }
    if (k == 0) bld.morphism("()", "()", "()");
  }

  // identities
  if (k == 0) {
    bld.identity("()", "()");
  } else {
    for (const auto& oix : obj_ixs) {
      std::vector<std::uint32_t> idm(k);
      for (std::size_t i = 0; i < k; ++i) idm[i] = factors[i]->identity[oix[i]];
      bld.identity(obj_tuple_id(oix), mor_tuple_id(idm));
    }
  }

  // composition: product of the factors' tables
  if (k == 0) {
    bld.compose_rule("()", "()", "()");
  } else {
    std::vector<std::size_t> cidx(k, 0);
    bool done = false;
    for (const auto& f : factors)
      if (f->comp.empty()) done = true;
    while (!done) {
      std::vector<std::uint32_t> g(k), f_(k), gf(k);
      for (std::size_t i = 0; i < k; ++i) {
        const auto& e = factors[i]->comp[cidx[i]];
        g[i] = static_cast<std::uint32_t>(e.first >> 32);
        f_[i] = static_cast<std::uint32_t>(e.first & 0xffffffffu);
        gf[i] = e.second;
      }
      bld.compose_rule(mor_tuple_id(g), mor_tuple_id(f_), mor_tuple_id(gf));
      std::size_t p = k;
      while (p > 0) {
        --p;
        if (++cidx[p] < factors[p]->comp.size()) break;
        cidx[p] = 0;
        if (p == 0) done = true;
      }
    }
  }

  ProductResult out;
  out.cat = bld.build(&meter);

  for (std::size_t i = 0; i < k; ++i) {
    FinFunctor pr;
    pr.source = out.cat;
    pr.target = factors[i];
    pr.omap.resize(out.cat->n_objects());
    pr.mmap.resize(out.cat->n_morphisms());
    for (std::size_t j = 0; j < obj_ixs.size(); ++j)
      pr.omap[out.cat->object_index(obj_tuple_id(obj_ixs[j]))] = obj_ixs[j][i];
    for (std::size_t j = 0; j < mor_ixs.size(); ++j)
      pr.mmap[out.cat->morphism_index(mor_tuple_id(mor_ixs[j]))] = mor_ixs[j][i];
    out.projections.push_back(std::move(pr));
  }

  return out;
}

FinFunctor tuple_functor(const std::vector<FinFunctor>& parts, const ProductResult& prod) {
  if (parts.empty()) throw input_error("tuple functor: empty component list");
  if (parts.size() != prod.projections.size())
    throw input_error("tuple functor: component count does not match the product");
  const std::size_t k = parts.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (!same_category(parts[i].source, parts[0].source))
      throw input_error("tuple functor: components have different sources");
    if (!same_category(parts[i].target, prod.projections[i].target))
      throw input_error("tuple functor: component target does not match the factor");
  }
  const FinCategory& x = *parts[0].source;
  FinFunctor out;
  out.source = parts[0].source;
  out.target = prod.cat;
  out.omap.resize(x.n_objects());
  out.mmap.resize(x.n_morphisms());
  std::vector<std::string> ids(k);
  for (std::uint32_t o = 0; o < x.n_objects(); ++o) {
    for (std::size_t i = 0; i < k; ++i) ids[i] = parts[i].target->obj_id(parts[i].omap[o]);
    out.omap[o] = prod.cat->object_index(enc_tuple(ids));
  }
  for (std::uint32_t m = 0; m < x.n_morphisms(); ++m) {
    for (std::size_t i = 0; i < k; ++i) ids[i] = parts[i].target->mor_id(parts[i].mmap[m]);
    out.mmap[m] = prod.cat->morphism_index(enc_tuple(ids));
  }
  return out;
}

SubcategoryResult full_subcategory(const CatPtr& c, const std::vector<std::uint32_t>& objs,
                                   const std::string& name, std::optional<Provenance> prov) {
  std::vector<bool> keep_obj(c->n_objects(), false);
  for (std::uint32_t o : objs) {
    if (o >= c->n_objects()) throw input_error("full subcategory: object index out of range");
    keep_obj[o] = true;
  }
  std::vector<bool> keep_mor(c->n_morphisms(), false);
  FinCategoryBuilder bld(name);
  if (prov) bld.provenance(std::move(*prov));
  for (std::uint32_t o = 0; o < c->n_objects(); ++o)
    if (keep_obj[o]) {
      bld.object(c->obj_id(o));
      bld.identity(c->obj_id(o), c->mor_id(c->identity[o]));
    }
  for (std::uint32_t m = 0; m < c->n_morphisms(); ++m)
    if (keep_obj[c->src(m)] && keep_obj[c->tgt(m)]) {
      keep_mor[m] = true;
      bld.morphism(c->mor_id(m), c->obj_id(c->src(m)), c->obj_id(c->tgt(m)));
    }
  for (const auto& e : c->comp) {
    auto g = static_cast<std::uint32_t>(e.first >> 32);
    auto f = static_cast<std::uint32_t>(e.first & 0xffffffffu);
    if (keep_mor[g] && keep_mor[f])
      bld.compose_rule(c->mor_id(g), c->mor_id(f), c->mor_id(e.second));
  }

  SubcategoryResult out;
  out.cat = bld.build();
  out.inclusion.source = out.cat;
  out.inclusion.target = c;
  out.inclusion.omap.resize(out.cat->n_objects());
  out.inclusion.mmap.resize(out.cat->n_morphisms());
  for (std::uint32_t o = 0; o < out.cat->n_objects(); ++o)
    out.inclusion.omap[o] = c->object_index(out.cat->obj_id(o));
  for (std::uint32_t m = 0; m < out.cat->n_morphisms(); ++m)
    out.inclusion.mmap[m] = c->morphism_index(out.cat->mor_id(m));
  return out;
}

std::string functor_digest_hex(const FinFunctor& f) {
  Digest d;
  d.feed("finfunctor");
  d.feed(f.source->digest_hex());
  d.feed(f.target->digest_hex());
  for (std::uint32_t o : f.omap) d.feed(f.target->obj_id(o));
  d.feed("|");
  for (std::uint32_t m : f.mmap) d.feed(f.target->mor_id(m));
  return d.hex();
}

std::string nat_digest_hex(const NatTransformation& n) {
  Digest d;
  d.feed("nattrans");
  d.feed(functor_digest_hex(n.source));
  d.feed(functor_digest_hex(n.target));
  for (std::uint32_t m : n.component) d.feed(n.source.target->mor_id(m));
  return d.hex();
}

}  // namespace pielim
