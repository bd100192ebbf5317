#include "pielim/engine.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_map>

namespace pielim {

namespace {

void check_spec(const TupleSpec& spec) {
  for (const TupleSlot& s : spec.slots) {
    if (s.src_factor >= spec.factors.size() || s.tgt_factor >= spec.factors.size())
      throw input_error("tuple spec: slot factor index out of range");
    if (!same_category(s.p.source, spec.factors[s.src_factor]) ||
        !same_category(s.q.source, spec.factors[s.tgt_factor]))
      throw input_error("tuple spec: slot functor source mismatch");
    if (!same_category(s.p.target, s.q.target))
      throw input_error("tuple spec: slot functor targets differ");
  }
}

struct Ids {
  const TupleSpec& spec;

  std::string carrier(const std::vector<std::uint32_t>& c) const {
    std::vector<std::string> parts(spec.factors.size());
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] = spec.factors[i]->obj_id(c[i]);
    return enc_tuple(parts);
  }
  std::string ftuple(const std::vector<std::uint32_t>& f) const {
    std::vector<std::string> parts(spec.factors.size());
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] = spec.factors[i]->mor_id(f[i]);
    return enc_tuple(parts);
  }
  std::string phi(const std::vector<std::uint32_t>& s) const {
    if (spec.slots.size() == 1) return spec.slots[0].p.target->mor_id(s[0]);
    std::vector<std::string> parts(spec.slots.size());
    for (std::size_t i = 0; i < parts.size(); ++i)
      parts[i] = spec.slots[i].p.target->mor_id(s[i]);
    return enc_tuple(parts);
  }
  std::string obj(const TupleObject& o) const {
    return enc_call("ins", {{"K", carrier(o.carrier)}, {"phi", phi(o.structure)}});
  }
  std::string mor(const std::vector<std::uint32_t>& f, const TupleObject& s,
                  const TupleObject& t) const {
    return enc_call("ins", {{"f", ftuple(f)}, {"phi", phi(s.structure)}, {"psi", phi(t.structure)}});
  }
};

// odometer over per-position candidate lists; body returns void, empty lists
// short-circuit to no iterations
template <typename Body>
void odometer(const std::vector<const std::vector<std::uint32_t>*>& cands, Body body) {
  std::size_t n = cands.size();
  for (const auto* c : cands)
    if (c->empty()) return;
  std::vector<std::size_t> ix(n, 0);
  std::vector<std::uint32_t> cur(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) cur[i] = (*cands[i])[ix[i]];
    body(cur);
    std::size_t p = n;
    bool done = (n == 0);
    while (p > 0) {
      --p;
      if (++ix[p] < cands[p]->size()) break;
      ix[p] = 0;
      if (p == 0) done = true;
    }
    if (done) break;
  }
}

// enumerate surviving objects; visit is called once per survivor
template <typename Visit>
void for_each_survivor(const TupleSpec& spec, BudgetMeter& meter, Visit visit) {
  std::size_t nf = spec.factors.size();
  std::vector<std::uint32_t> carrier(nf, 0);
  std::vector<std::vector<std::uint32_t>> obj_lists(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    obj_lists[i].resize(spec.factors[i]->n_objects());
    for (std::uint32_t o = 0; o < spec.factors[i]->n_objects(); ++o) obj_lists[i][o] = o;
  }
  std::vector<const std::vector<std::uint32_t>*> obj_cands(nf);
  for (std::size_t i = 0; i < nf; ++i) obj_cands[i] = &obj_lists[i];

  odometer(obj_cands, [&](const std::vector<std::uint32_t>& c) {
    meter.spend(1, "tuple carrier");
    std::vector<const std::vector<std::uint32_t>*> slot_cands(spec.slots.size());
    for (std::size_t i = 0; i < spec.slots.size(); ++i) {
      const TupleSlot& s = spec.slots[i];
      slot_cands[i] = &s.p.target->hom(s.p.omap[c[s.src_factor]], s.q.omap[c[s.tgt_factor]]);
    }
    odometer(slot_cands, [&](const std::vector<std::uint32_t>& st) {
      meter.spend(1, "tuple structure");
      TupleObject cand{c, st};
      for (const EquifierFamily& fam : spec.families)
        if (!fam.keep(cand)) return;
      visit(std::move(cand));
    });
  });
}

}  // namespace

std::uint64_t count_tuple_objects(const TupleSpec& spec, const Budget& budget) {
  check_spec(spec);
  BudgetMeter meter(budget);
  std::uint64_t n = 0;
  for_each_survivor(spec, meter, [&](TupleObject&&) {
    ++n;
    meter.check_objects(n, "tuple objects");
  });
  return n;
}

TupleResult build_tuple_category(const TupleSpec& spec, const Budget& budget) {
  check_spec(spec);

  // no slots: the ambient inserter is the product itself, so ids stay plain
  // product tuples, exactly as the materialized pipeline would leave them
  if (spec.slots.empty()) {
    ProductResult prod = product_category(spec.factors, budget);
    std::vector<TupleObject> all(prod.cat->n_objects());
    std::vector<std::uint32_t> kept;
    for (std::uint32_t o = 0; o < prod.cat->n_objects(); ++o) {
      all[o].carrier.resize(spec.factors.size());
      for (std::size_t i = 0; i < spec.factors.size(); ++i)
        all[o].carrier[i] = prod.projections[i].omap[o];
      bool keep = true;
      for (const EquifierFamily& fam : spec.families)
        if (!fam.keep(all[o])) {
          keep = false;
          break;
        }
      if (keep) kept.push_back(o);
    }
    SubcategoryResult sub = full_subcategory(prod.cat, kept, spec.name, spec.prov);
    TupleResult out;
    out.cat = sub.cat;
    out.factors = spec.factors;
    out.objects.resize(sub.cat->n_objects());
    out.mor_carrier.resize(sub.cat->n_morphisms());
    for (std::uint32_t o = 0; o < sub.cat->n_objects(); ++o)
      out.objects[o] = all[sub.inclusion.omap[o]];
    for (std::uint32_t m = 0; m < sub.cat->n_morphisms(); ++m) {
      out.mor_carrier[m].resize(spec.factors.size());
      for (std::size_t i = 0; i < spec.factors.size(); ++i)
        out.mor_carrier[m][i] = prod.projections[i].mmap[sub.inclusion.mmap[m]];
    }
    return out;
  }

  BudgetMeter meter(budget);
  Ids ids{spec};
  std::size_t nf = spec.factors.size();

  std::vector<TupleObject> objs;
  for_each_survivor(spec, meter, [&](TupleObject&& cand) {
    objs.push_back(std::move(cand));
    meter.check_objects(objs.size(), "tuple objects");
  });

  // group survivors by carrier tuple for the morphism sweep
  std::unordered_map<std::string, std::vector<std::uint32_t>> groups;
  std::vector<std::string> group_order;
  for (std::uint32_t i = 0; i < objs.size(); ++i) {
    std::string key = ids.carrier(objs[i].carrier);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) group_order.push_back(key);
    it->second.push_back(i);
  }

  std::vector<std::string> obj_ids(objs.size());
  for (std::uint32_t i = 0; i < objs.size(); ++i) obj_ids[i] = ids.obj(objs[i]);

  struct MRec {
    std::vector<std::uint32_t> f;
    std::uint32_t src, tgt;
  };
  std::vector<MRec> mors;
  std::vector<std::vector<std::uint32_t>> in_to(objs.size()), out_of(objs.size());

  // (src, tgt, factor tuple) -> morphism index, packed as raw bytes; resolves
  // identities and composites without rebuilding id strings per table entry
  std::unordered_map<std::string, std::uint32_t> lookup;
  auto pack = [nf](std::uint32_t s, std::uint32_t t, const std::vector<std::uint32_t>& f) {
    std::string key((2 + nf) * 4, '\0');
    auto put = [&](std::size_t pos, std::uint32_t v) {
      std::memcpy(key.data() + pos * 4, &v, 4);
    };
    put(0, s);
    put(1, t);
    for (std::size_t i = 0; i < nf; ++i) put(2 + i, f[i]);
    return key;
  };

  for (const std::string& kx : group_order) {
    const auto& gx = groups[kx];
    const TupleObject& x0 = objs[gx[0]];
    for (const std::string& ky : group_order) {
      const auto& gy = groups[ky];
      const TupleObject& y0 = objs[gy[0]];

      std::vector<const std::vector<std::uint32_t>*> mor_cands(nf);
      for (std::size_t i = 0; i < nf; ++i)
        mor_cands[i] = &spec.factors[i]->hom(x0.carrier[i], y0.carrier[i]);

      odometer(mor_cands, [&](const std::vector<std::uint32_t>& f) {
        // slot images of f are shared across all survivor pairs in the group
        std::vector<std::uint32_t> pf(spec.slots.size()), qf(spec.slots.size());
        for (std::size_t i = 0; i < spec.slots.size(); ++i) {
          pf[i] = spec.slots[i].p.mmap[f[spec.slots[i].src_factor]];
          qf[i] = spec.slots[i].q.mmap[f[spec.slots[i].tgt_factor]];
        }
        for (std::uint32_t s1 : gx) {
          for (std::uint32_t s2 : gy) {
            meter.spend(1, "tuple morphisms");
            bool ok = true;
            for (std::size_t i = 0; i < spec.slots.size() && ok; ++i) {
              const FinCategory& l = *spec.slots[i].p.target;
              ok = l.compose(objs[s2].structure[i], pf[i]) ==
                   l.compose(qf[i], objs[s1].structure[i]);
            }
            if (!ok) continue;
            auto ix = static_cast<std::uint32_t>(mors.size());
            mors.push_back({f, s1, s2});
            out_of[s1].push_back(ix);
            in_to[s2].push_back(ix);
            lookup.emplace(pack(s1, s2, f), ix);
            meter.check_morphisms(mors.size(), "tuple morphisms");
          }
        }
      });
    }
  }

  AssembleInput ai;
  ai.name = spec.name;
  ai.prov = spec.prov;
  ai.objects = obj_ids;
  std::vector<std::string> mids(mors.size());
  ai.morphisms.reserve(mors.size());
  for (std::uint32_t i = 0; i < mors.size(); ++i) {
    mids[i] = ids.mor(mors[i].f, objs[mors[i].src], objs[mors[i].tgt]);
    ai.morphisms.push_back({mids[i], mors[i].src, mors[i].tgt});
  }

  ai.identity.resize(objs.size());
  std::vector<std::uint32_t> idf(nf);
  for (std::uint32_t o = 0; o < objs.size(); ++o) {
    for (std::size_t i = 0; i < nf; ++i)
      idf[i] = spec.factors[i]->identity[objs[o].carrier[i]];
    auto it = lookup.find(pack(o, o, idf));
    if (it == lookup.end()) throw std::logic_error("tuple category: identity not enumerated");
    ai.identity[o] = it->second;
  }

  std::uint64_t n_comp = 0;
  std::vector<std::uint32_t> cf(nf);
  for (std::uint32_t q = 0; q < objs.size(); ++q) {
    for (std::uint32_t m1 : in_to[q]) {
      for (std::uint32_t m2 : out_of[q]) {
        meter.spend(1, "tuple composition");
        ++n_comp;
        meter.check_comp(n_comp, "tuple composition");
        for (std::size_t i = 0; i < nf; ++i)
          cf[i] = spec.factors[i]->compose(mors[m2].f[i], mors[m1].f[i]);
        auto it = lookup.find(pack(mors[m1].src, mors[m2].tgt, cf));
        if (it == lookup.end())
          throw std::logic_error("tuple category: composite not enumerated");
        ai.comp.push_back({m2, m1, it->second});
      }
    }
  }

  TupleResult out;
  out.cat = assemble_category(std::move(ai), &meter);
  out.factors = spec.factors;
  out.objects.resize(objs.size());
  out.mor_carrier.resize(mors.size());
  for (std::uint32_t i = 0; i < objs.size(); ++i)
    out.objects[out.cat->object_index(obj_ids[i])] = objs[i];
  for (std::uint32_t i = 0; i < mors.size(); ++i)
    out.mor_carrier[out.cat->morphism_index(mids[i])] = std::move(mors[i].f);
  return out;
}

FinFunctor tuple_factor_projection(const TupleResult& r, std::uint32_t factor) {
  if (factor >= r.factors.size()) throw input_error("tuple projection: factor out of range");
  FinFunctor out;
  out.source = r.cat;
  out.target = r.factors[factor];
  out.omap.resize(r.objects.size());
  out.mmap.resize(r.mor_carrier.size());
  for (std::size_t o = 0; o < r.objects.size(); ++o) out.omap[o] = r.objects[o].carrier[factor];
  for (std::size_t m = 0; m < r.mor_carrier.size(); ++m) out.mmap[m] = r.mor_carrier[m][factor];
  return out;
}

}  // namespace pielim
