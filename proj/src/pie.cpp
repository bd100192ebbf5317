#include "pielim/pie.hpp"

#include <algorithm>
#include <unordered_map>

namespace pielim {

namespace {

void require_parallel(const FinFunctor& f, const FinFunctor& g, const char* what) {
  if (!same_category(f.source, g.source) || !same_category(f.target, g.target))
    throw input_error(std::string(what) + ": functors are not parallel");
}

std::string ins_obj_id(const std::string& carrier, const std::string& phi) {
  return enc_call("ins", {{"K", carrier}, {"phi", phi}});
}

std::string ins_mor_id(const std::string& f, const std::string& phi, const std::string& psi) {
  return enc_call("ins", {{"f", f}, {"phi", phi}, {"psi", psi}});
}

// Shared enumeration for inserter and joint_inserter: one structure morphism
// per parallel pair, all constraints checked componentwise. `phi_id` renders
// the family for the canonical ids (bare for one pair, tuple for several).
struct InserterBuild {
  CatPtr cat;
  FinFunctor forgetful;
  std::vector<std::vector<std::uint32_t>> structure;
};

InserterBuild build_inserter(const CatPtr& k,
                             const std::vector<std::pair<FinFunctor, FinFunctor>>& pairs,
                             const Budget& budget, const std::string& name, Provenance prov) {
  BudgetMeter meter(budget);
  const FinCategory& kc = *k;
  const std::size_t np = pairs.size();

  auto phi_id = [&](const std::vector<std::uint32_t>& fam) {
    if (np == 1) return pairs[0].first.target->mor_id(fam[0]);
    std::vector<std::string> parts(np);
    for (std::size_t i = 0; i < np; ++i) parts[i] = pairs[i].first.target->mor_id(fam[i]);
    return enc_tuple(parts);
  };

  // objects: a carrier x and one structure morphism F_i(x) -> G_i(x) per pair
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> objs;
  std::vector<std::vector<std::uint32_t>> at_obj(kc.n_objects());
  for (std::uint32_t x = 0; x < kc.n_objects(); ++x) {
    std::vector<const std::vector<std::uint32_t>*> cands(np);
    bool empty = false;
    for (std::size_t i = 0; i < np; ++i) {
      cands[i] = &pairs[i].first.target->hom(pairs[i].first.omap[x], pairs[i].second.omap[x]);
      if (cands[i]->empty()) empty = true;
    }
    if (empty) continue;
    std::vector<std::size_t> ix(np, 0);
    while (true) {
      meter.spend(1, "inserter objects");
      std::vector<std::uint32_t> fam(np);
      for (std::size_t i = 0; i < np; ++i) fam[i] = (*cands[i])[ix[i]];
      at_obj[x].push_back(static_cast<std::uint32_t>(objs.size()));
      objs.emplace_back(x, std::move(fam));
      std::size_t p = np;
      bool done = false;
      while (p > 0) {
        --p;
        if (++ix[p] < cands[p]->size()) break;
        ix[p] = 0;
        if (p == 0) done = true;
      }
      if (done) break;
    }
  }
  meter.check_objects(objs.size(), "inserter");

  FinCategoryBuilder bld(name);
  bld.provenance(std::move(prov));
  auto obj_id_of = [&](std::uint32_t p) {
    return ins_obj_id(kc.obj_id(objs[p].first), phi_id(objs[p].second));
  };
  for (std::uint32_t p = 0; p < objs.size(); ++p) bld.object(obj_id_of(p));

  // morphisms: underlying f with G_i(f).phi_i = chi_i.F_i(f) for all i
  struct MRec {
    std::uint32_t f, src, tgt;  // src/tgt index into objs
  };
  std::vector<MRec> mors;
  std::vector<std::vector<std::uint32_t>> in_to(objs.size()), out_of(objs.size());
  for (std::uint32_t f = 0; f < kc.n_morphisms(); ++f) {
    for (std::uint32_t ps : at_obj[kc.src(f)]) {
      for (std::uint32_t pt : at_obj[kc.tgt(f)]) {
        meter.spend(1, "inserter morphisms");
        bool ok = true;
        for (std::size_t i = 0; i < np && ok; ++i) {
          const FinCategory& li = *pairs[i].first.target;
          ok = li.compose(pairs[i].second.mmap[f], objs[ps].second[i]) ==
               li.compose(objs[pt].second[i], pairs[i].first.mmap[f]);
        }
        if (!ok) continue;
        auto ix = static_cast<std::uint32_t>(mors.size());
        mors.push_back({f, ps, pt});
        out_of[ps].push_back(ix);
        in_to[pt].push_back(ix);
        bld.morphism(ins_mor_id(kc.mor_id(f), phi_id(objs[ps].second), phi_id(objs[pt].second)),
                     obj_id_of(ps), obj_id_of(pt));
      }
    }
  }
  meter.check_morphisms(mors.size(), "inserter");

  for (std::uint32_t p = 0; p < objs.size(); ++p) {
    const std::string& phi = phi_id(objs[p].second);
    bld.identity(obj_id_of(p), ins_mor_id(kc.mor_id(kc.identity[objs[p].first]), phi, phi));
  }

  auto mor_id_of = [&](const MRec& m) {
    return ins_mor_id(kc.mor_id(m.f), phi_id(objs[m.src].second), phi_id(objs[m.tgt].second));
  };
  std::uint64_t n_comp = 0;
  for (std::uint32_t q = 0; q < objs.size(); ++q) {
    for (std::uint32_t m1 : in_to[q]) {
      for (std::uint32_t m2 : out_of[q]) {
        meter.spend(1, "inserter composition");
        ++n_comp;
        meter.check_comp(n_comp, "inserter");
        MRec comp{kc.compose(mors[m2].f, mors[m1].f), mors[m1].src, mors[m2].tgt};
        bld.compose_rule(mor_id_of(mors[m2]), mor_id_of(mors[m1]), mor_id_of(comp));
      }
    }
  }

  InserterBuild out;
  out.cat = bld.build(&meter);
  out.forgetful.source = out.cat;
  out.forgetful.target = k;
  out.forgetful.omap.resize(out.cat->n_objects());
  out.forgetful.mmap.resize(out.cat->n_morphisms());
  out.structure.resize(out.cat->n_objects());
  for (std::uint32_t p = 0; p < objs.size(); ++p) {
    std::uint32_t o = out.cat->object_index(obj_id_of(p));
    out.forgetful.omap[o] = objs[p].first;
    out.structure[o] = objs[p].second;
  }
  for (const MRec& m : mors)
    out.forgetful.mmap[out.cat->morphism_index(mor_id_of(m))] = m.f;
  return out;
}

}  // namespace

InserterResult inserter(const FinFunctor& f, const FinFunctor& g, const Budget& budget) {
  require_parallel(f, g, "inserter");
  Provenance prov{"inserter",
                  {{"F", functor_digest_hex(f)}, {"G", functor_digest_hex(g)}}};
  auto built = build_inserter(f.source, {{f, g}}, budget, "inserter", std::move(prov));
  InserterResult out;
  out.cat = std::move(built.cat);
  out.forgetful = std::move(built.forgetful);
  out.structure.resize(built.structure.size());
  for (std::size_t i = 0; i < built.structure.size(); ++i)
    out.structure[i] = built.structure[i][0];
  return out;
}

InserterResult iso_inserter(const FinFunctor& p, const FinFunctor& q, const Budget& budget) {
  require_parallel(p, q, "iso-inserter");
  InserterResult ins = inserter(p, q, budget);
  const FinCategory& l = *p.target;
  std::vector<std::uint32_t> kept;
  for (std::uint32_t o = 0; o < ins.cat->n_objects(); ++o)
    if (l.inverse(ins.structure[o]).has_value()) kept.push_back(o);
  Provenance prov{"iso-inserter",
                  {{"P", functor_digest_hex(p)}, {"Q", functor_digest_hex(q)}}};
  SubcategoryResult sub = full_subcategory(ins.cat, kept, "iso-inserter", std::move(prov));
  InserterResult out;
  out.cat = sub.cat;
  out.forgetful = compose_functors(ins.forgetful, sub.inclusion);
  out.structure.resize(sub.cat->n_objects());
  for (std::uint32_t o = 0; o < sub.cat->n_objects(); ++o)
    out.structure[o] = ins.structure[sub.inclusion.omap[o]];
  return out;
}

JointInserterResult joint_inserter(const CatPtr& k,
                                   const std::vector<std::pair<FinFunctor, FinFunctor>>& pairs,
                                   const Budget& budget) {
  JointInserterResult out;
  if (pairs.empty()) {
    out.cat = k;
    out.forgetful = identity_functor(k);
    out.structure.assign(k->n_objects(), {});
    return out;
  }
  for (const auto& [f, g] : pairs) {
    require_parallel(f, g, "joint inserter");
    if (!same_category(f.source, k))
      throw input_error("joint inserter: pair source differs from the given base");
  }
  if (pairs.size() == 1) {
    InserterResult one = inserter(pairs[0].first, pairs[0].second, budget);
    out.cat = std::move(one.cat);
    out.forgetful = std::move(one.forgetful);
    out.structure.resize(one.structure.size());
    for (std::size_t i = 0; i < one.structure.size(); ++i)
      out.structure[i] = {one.structure[i]};
    return out;
  }
  Provenance prov{"joint-inserter", {}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    prov.inputs.emplace_back("F" + std::to_string(i), functor_digest_hex(pairs[i].first));
    prov.inputs.emplace_back("G" + std::to_string(i), functor_digest_hex(pairs[i].second));
  }
  auto built = build_inserter(k, pairs, budget, "joint-inserter", std::move(prov));
  out.cat = std::move(built.cat);
  out.forgetful = std::move(built.forgetful);
  out.structure = std::move(built.structure);
  return out;
}

SubcategoryView equifier(const NatTransformation& phi, const NatTransformation& psi) {
  if (!functor_equal(phi.source, psi.source) || !functor_equal(phi.target, psi.target))
    throw input_error("equifier: transformations are not parallel");
  SubcategoryView view;
  view.ambient = phi.source.source;
  for (std::uint32_t o = 0; o < view.ambient->n_objects(); ++o)
    if (phi.component[o] == psi.component[o]) view.kept.push_back(o);
  view.prov = Provenance{"equifier",
                         {{"phi", nat_digest_hex(phi)}, {"psi", nat_digest_hex(psi)}}};
  return view;
}

SubcategoryView joint_equifier(
    const CatPtr& k,
    const std::vector<std::pair<NatTransformation, NatTransformation>>& pairs) {
  SubcategoryView view;
  view.ambient = k;
  Provenance prov{"joint-equifier", {}};
  std::vector<char> keep(k->n_objects(), 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [phi, psi] = pairs[i];
    if (!functor_equal(phi.source, psi.source) || !functor_equal(phi.target, psi.target))
      throw input_error("joint equifier: transformations are not parallel");
    if (!same_category(phi.source.source, k))
      throw input_error("joint equifier: pair source differs from the given base");
    for (std::uint32_t o = 0; o < k->n_objects(); ++o)
      if (phi.component[o] != psi.component[o]) keep[o] = 0;
    prov.inputs.emplace_back("phi" + std::to_string(i), nat_digest_hex(phi));
    prov.inputs.emplace_back("psi" + std::to_string(i), nat_digest_hex(psi));
  }
  for (std::uint32_t o = 0; o < k->n_objects(); ++o)
    if (keep[o]) view.kept.push_back(o);
  view.prov = std::move(prov);
  return view;
}

PseudopullbackResult pseudopullback_direct(const FinFunctor& theta_a,
                                           const FinFunctor& theta_b, const Budget& budget) {
  if (!same_category(theta_a.target, theta_b.target))
    throw input_error("pseudopullback: targets differ");
  BudgetMeter meter(budget);
  const FinCategory& a = *theta_a.source;
  const FinCategory& b = *theta_b.source;
  const FinCategory& c = *theta_a.target;

  FinCategoryBuilder bld("pseudopullback");
  bld.provenance(Provenance{"pseudopullback",
                            {{"ThetaA", functor_digest_hex(theta_a)},
                             {"ThetaB", functor_digest_hex(theta_b)}}});

  auto obj_id = [&](std::uint32_t ai, std::uint32_t bi, std::uint32_t th) {
    return enc_call("ppb", {{"A", a.obj_id(ai)}, {"B", b.obj_id(bi)}, {"th", c.mor_id(th)}});
  };
  auto mor_id = [&](std::uint32_t f, std::uint32_t g, std::uint32_t ts, std::uint32_t tt) {
    return enc_call("ppb", {{"f", a.mor_id(f)},
                            {"g", b.mor_id(g)},
                            {"th", c.mor_id(ts)},
                            {"th2", c.mor_id(tt)}});
  };

  std::vector<std::array<std::uint32_t, 3>> objs;
  // glue candidates grouped by the (a, b) carrier pair
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> at_pair;
  for (std::uint32_t ai = 0; ai < a.n_objects(); ++ai)
    for (std::uint32_t bi = 0; bi < b.n_objects(); ++bi)
      for (std::uint32_t th : c.hom(theta_a.omap[ai], theta_b.omap[bi])) {
        meter.spend(1, "pseudopullback objects");
        if (!c.inverse(th).has_value()) continue;
        at_pair[pair_key(ai, bi)].push_back(static_cast<std::uint32_t>(objs.size()));
        objs.push_back({ai, bi, th});
        bld.object(obj_id(ai, bi, th));
      }
  meter.check_objects(objs.size(), "pseudopullback");

  struct MRec {
    std::uint32_t f, g, src, tgt;
  };
  std::vector<MRec> mors;
  std::vector<std::vector<std::uint32_t>> in_to(objs.size()), out_of(objs.size());
  for (std::uint32_t f = 0; f < a.n_morphisms(); ++f) {
    for (std::uint32_t g = 0; g < b.n_morphisms(); ++g) {
      auto s = at_pair.find(pair_key(a.src(f), b.src(g)));
      auto t = at_pair.find(pair_key(a.tgt(f), b.tgt(g)));
      if (s == at_pair.end() || t == at_pair.end()) continue;
      for (std::uint32_t ps : s->second) {
        for (std::uint32_t pt : t->second) {
          meter.spend(1, "pseudopullback morphisms");
          if (c.compose(objs[pt][2], theta_a.mmap[f]) !=
              c.compose(theta_b.mmap[g], objs[ps][2]))
            continue;
          auto ix = static_cast<std::uint32_t>(mors.size());
          mors.push_back({f, g, ps, pt});
          out_of[ps].push_back(ix);
          in_to[pt].push_back(ix);
          bld.morphism(mor_id(f, g, objs[ps][2], objs[pt][2]),
                       obj_id(objs[ps][0], objs[ps][1], objs[ps][2]),
                       obj_id(objs[pt][0], objs[pt][1], objs[pt][2]));
        }
      }
    }
  }
  meter.check_morphisms(mors.size(), "pseudopullback");

  for (std::uint32_t p = 0; p < objs.size(); ++p)
    bld.identity(obj_id(objs[p][0], objs[p][1], objs[p][2]),
                 mor_id(a.identity[objs[p][0]], b.identity[objs[p][1]], objs[p][2], objs[p][2]));

  std::uint64_t n_comp = 0;
  for (std::uint32_t q = 0; q < objs.size(); ++q) {
    for (std::uint32_t m1 : in_to[q]) {
      for (std::uint32_t m2 : out_of[q]) {
        meter.spend(1, "pseudopullback composition");
        ++n_comp;
        meter.check_comp(n_comp, "pseudopullback");
        bld.compose_rule(
            mor_id(mors[m2].f, mors[m2].g, objs[mors[m2].src][2], objs[mors[m2].tgt][2]),
            mor_id(mors[m1].f, mors[m1].g, objs[mors[m1].src][2], objs[mors[m1].tgt][2]),
            mor_id(a.compose(mors[m2].f, mors[m1].f), b.compose(mors[m2].g, mors[m1].g),
                   objs[mors[m1].src][2], objs[mors[m2].tgt][2]));
      }
    }
  }

  PseudopullbackResult out;
  out.cat = bld.build(&meter);
  out.to_left.source = out.cat;
  out.to_left.target = theta_a.source;
  out.to_right.source = out.cat;
  out.to_right.target = theta_b.source;
  out.to_left.omap.resize(out.cat->n_objects());
  out.to_left.mmap.resize(out.cat->n_morphisms());
  out.to_right.omap.resize(out.cat->n_objects());
  out.to_right.mmap.resize(out.cat->n_morphisms());
  out.obj_data.resize(out.cat->n_objects());
  out.mor_data.resize(out.cat->n_morphisms());
  for (const auto& o : objs) {
    std::uint32_t ix = out.cat->object_index(obj_id(o[0], o[1], o[2]));
    out.to_left.omap[ix] = o[0];
    out.to_right.omap[ix] = o[1];
    out.obj_data[ix] = o;
  }
  for (const MRec& m : mors) {
    std::uint32_t ix = out.cat->morphism_index(
        mor_id(m.f, m.g, objs[m.src][2], objs[m.tgt][2]));
    out.to_left.mmap[ix] = m.f;
    out.to_right.mmap[ix] = m.g;
    out.mor_data[ix] = {m.f, m.g, objs[m.src][2], objs[m.tgt][2]};
  }
  return out;
}

PseudopullbackViaPie pseudopullback_via_pie(const FinFunctor& theta_a,
                                            const FinFunctor& theta_b, const Budget& budget) {
  if (!same_category(theta_a.target, theta_b.target))
    throw input_error("pseudopullback: targets differ");
  const CatPtr& c = theta_a.target;
  ProductResult k = product_category({theta_a.source, theta_b.source}, budget);
  ProductResult l = product_category({c, c}, budget);

  FinFunctor ta = compose_functors(theta_a, k.projections[0]);
  FinFunctor tb = compose_functors(theta_b, k.projections[1]);
  FinFunctor f = tuple_functor({ta, tb}, l);
  FinFunctor g = tuple_functor({tb, ta}, l);
  InserterResult e = inserter(f, g, budget);

  // the two components of the structure morphism of a quadruple
  const FinFunctor& pr1 = l.projections[0];
  const FinFunctor& pr2 = l.projections[1];

  FinFunctor ua = compose_functors(ta, e.forgetful);  // e -> C, image Theta_A(a)
  FinFunctor ub = compose_functors(tb, e.forgetful);  // e -> C, image Theta_B(b)

  NatTransformation tau_b{ub, ub, {}};  // th' . th'' at each quadruple
  NatTransformation tau_a{ua, ua, {}};  // th'' . th'
  tau_b.component.resize(e.cat->n_objects());
  tau_a.component.resize(e.cat->n_objects());
  for (std::uint32_t o = 0; o < e.cat->n_objects(); ++o) {
    std::uint32_t th1 = pr1.mmap[e.structure[o]];
    std::uint32_t th2 = pr2.mmap[e.structure[o]];
    tau_b.component[o] = c->compose(th1, th2);
    tau_a.component[o] = c->compose(th2, th1);
  }

  SubcategoryView view = joint_equifier(
      e.cat, {{identity_nat(ub), tau_b}, {identity_nat(ua), tau_a}});

  PseudopullbackViaPie out;
  out.cat = full_subcategory(e.cat, view.kept, "pseudopullback-pie",
                             Provenance{"pseudopullback-via-pie",
                                        {{"ThetaA", functor_digest_hex(theta_a)},
                                         {"ThetaB", functor_digest_hex(theta_b)}}})
                .cat;
  PseudopullbackResult direct = pseudopullback_direct(theta_a, theta_b, budget);
  out.direct = direct.cat;

  const FinCategory& a = *theta_a.source;
  const FinCategory& b = *theta_b.source;
  auto quad_obj = [&](const std::array<std::uint32_t, 3>& d) {
    std::uint32_t inv = *c->inverse(d[2]);
    return ins_obj_id(enc_tuple({a.obj_id(d[0]), b.obj_id(d[1])}),
                      enc_tuple({c->mor_id(d[2]), c->mor_id(inv)}));
  };
  auto quad_phi = [&](std::uint32_t th) {
    return enc_tuple({c->mor_id(th), c->mor_id(*c->inverse(th))});
  };

  out.witness.source = direct.cat;
  out.witness.target = out.cat;
  out.witness.omap.resize(direct.cat->n_objects());
  out.witness.mmap.resize(direct.cat->n_morphisms());
  for (std::uint32_t o = 0; o < direct.cat->n_objects(); ++o) {
    auto ix = out.cat->find_object(quad_obj(direct.obj_data[o]));
    if (!ix) throw std::logic_error("pseudopullback: missing quadruple object");
    out.witness.omap[o] = *ix;
  }
  for (std::uint32_t m = 0; m < direct.cat->n_morphisms(); ++m) {
    const auto& d = direct.mor_data[m];
    auto ix = out.cat->find_morphism(
        ins_mor_id(enc_tuple({a.mor_id(d[0]), b.mor_id(d[1])}), quad_phi(d[2]), quad_phi(d[3])));
    if (!ix) throw std::logic_error("pseudopullback: missing quadruple morphism");
    out.witness.mmap[m] = *ix;
  }
  if (!validate_functor(out.witness).ok || !functor_is_iso(out.witness))
    throw std::logic_error("pseudopullback: canonical witness failed verification");
  return out;
}

ReductionReport pullback_isomorpher_reduction(ReductionDirection dir, const FinFunctor& x,
                                              const FinFunctor& y, const Budget& budget) {
  ReductionReport out;
  BudgetMeter meter(budget);
  if (dir == ReductionDirection::ToIsomorpher) {
    if (!same_category(x.target, y.target))
      throw input_error("reduction: pseudopullback targets differ");
    ProductResult h = product_category({x.source, y.source}, budget);
    FinFunctor p = compose_functors(x, h.projections[0]);
    FinFunctor q = compose_functors(y, h.projections[1]);
    out.constructed = iso_inserter(p, q, budget).cat;
    out.reference = pseudopullback_direct(x, y, budget).cat;
    out.comparison =
        compare_categories(out.constructed, out.reference, CompareMode::Isomorphism, meter);
  } else {
    require_parallel(x, y, "reduction");
    ProductResult c = product_category({x.source, x.target}, budget);
    FinFunctor ta = tuple_functor({identity_functor(x.source), x}, c);
    FinFunctor tb = tuple_functor({identity_functor(y.source), y}, c);
    out.constructed = pseudopullback_direct(ta, tb, budget).cat;
    out.reference = iso_inserter(x, y, budget).cat;
    out.comparison =
        compare_categories(out.constructed, out.reference, CompareMode::Equivalence, meter);
  }
  return out;
}

}  // namespace pielim
