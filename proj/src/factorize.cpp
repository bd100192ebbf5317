#include "pielim/factorize.hpp"

#include <algorithm>
#include <stdexcept>

namespace pielim {

namespace {

// least stage whose leg absorbs f, together with the least factoring
// morphism; the maximum always qualifies for a valid presentation, so a
// miss means the cocone data is unusable
std::pair<std::uint32_t, std::uint32_t> first_factoring_stage(std::uint32_t f,
                                                              const FilteredPresentation& p,
                                                              const char* who) {
  const FinCategory& ix = *p.stages.source;
  const FinCategory& k = *p.stages.target;
  for (std::uint32_t x = 0; x < ix.n_objects(); ++x)
    for (std::uint32_t g : k.hom(k.src(f), p.stages.omap[x]))
      if (k.compose(p.legs[x], g) == f) return {x, g};
  throw input_error(std::string(who) + ": no stage factors the morphism " + k.mor_id(f));
}

bool chain_walks_up(const std::vector<std::uint32_t>& chain, std::uint32_t stage,
                    const FinCategory& ix) {
  if (chain.empty() || chain.back() != stage) return false;
  if (chain.size() > ix.n_objects()) return false;
  for (std::uint32_t c : chain)
    if (c >= ix.n_objects()) return false;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (ix.hom(chain[i], chain[i + 1]).empty()) return false;
  return true;
}

void require_valid(const FilteredPresentation& p, const char* who) {
  ValidationReport rep = validate_presentation(p);
  if (!rep.ok)
    throw input_error(std::string(who) + ": invalid presentation: " + rep.violations.front().law);
}

}  // namespace

FilteredPresentation make_presentation(FinFunctor stages, const std::string& apex,
                                       const std::vector<std::string>& legs) {
  if (!stages.source || !stages.target) throw input_error("presentation: missing category");
  const FinCategory& k = *stages.target;
  FilteredPresentation p;
  p.apex = k.object_index(apex);
  p.legs.reserve(legs.size());
  for (const std::string& id : legs) p.legs.push_back(k.morphism_index(id));
  p.stages = std::move(stages);
  return p;
}

ValidationReport validate_presentation(const FilteredPresentation& p) {
  ValidationReport rep;
  if (!p.stages.source || !p.stages.target) {
    rep.add("stages", {"missing category"});
    return rep;
  }
  const FinCategory& ix = *p.stages.source;
  const FinCategory& k = *p.stages.target;
  if (ix.n_objects() == 0) {
    rep.add("index", {"empty"});
    return rep;
  }
  for (std::uint32_t x = 0; x < ix.n_objects(); ++x)
    for (std::uint32_t y = 0; y < ix.n_objects(); ++y) {
      if (ix.hom(x, y).size() > 1) rep.add("index", {"not thin", ix.obj_id(x), ix.obj_id(y)});
      if (x < y && !ix.hom(x, y).empty() && !ix.hom(y, x).empty())
        rep.add("index", {"not antisymmetric", ix.obj_id(x), ix.obj_id(y)});
    }
  for (std::uint32_t x = 0; x < ix.n_objects(); ++x)
    for (std::uint32_t y = x; y < ix.n_objects(); ++y) {
      bool bounded = false;
      for (std::uint32_t z = 0; z < ix.n_objects() && !bounded; ++z)
        bounded = !ix.hom(x, z).empty() && !ix.hom(y, z).empty();
      if (!bounded) rep.add("index", {"not directed", ix.obj_id(x), ix.obj_id(y)});
    }
  if (!validate_functor(p.stages).ok) {
    rep.add("stages", {"not a functor"});
    return rep;
  }
  if (p.apex >= k.n_objects()) {
    rep.add("legs", {"apex out of range"});
    return rep;
  }
  if (p.legs.size() != ix.n_objects()) {
    rep.add("legs", {"one leg per stage required"});
    return rep;
  }
  for (std::uint32_t x = 0; x < ix.n_objects(); ++x) {
    if (p.legs[x] >= k.n_morphisms()) {
      rep.add("legs", {"morphism out of range", ix.obj_id(x)});
      return rep;
    }
    if (k.src(p.legs[x]) != p.stages.omap[x] || k.tgt(p.legs[x]) != p.apex)
      rep.add("legs", {"endpoints", ix.obj_id(x)});
  }
  if (!rep.ok) return rep;
  for (std::uint32_t u = 0; u < ix.n_morphisms(); ++u)
    if (k.compose(p.legs[ix.tgt(u)], p.stages.mmap[u]) != p.legs[ix.src(u)])
      rep.add("cocone", {ix.mor_id(u)});
  std::optional<std::uint32_t> top;
  for (std::uint32_t m = 0; m < ix.n_objects() && !top; ++m) {
    bool above_all = true;
    for (std::uint32_t x = 0; x < ix.n_objects() && above_all; ++x)
      above_all = !ix.hom(x, m).empty();
    if (above_all) top = m;
  }
  if (!top)
    rep.add("maximum", {"no maximum element"});
  else if (!k.inverse(p.legs[*top]))
    rep.add("maximum", {"top leg not invertible", ix.obj_id(*top)});
  return rep;
}

std::uint32_t presentation_maximum(const FilteredPresentation& p) {
  if (!p.stages.source) throw input_error("presentation: missing category");
  const FinCategory& ix = *p.stages.source;
  for (std::uint32_t m = 0; m < ix.n_objects(); ++m) {
    bool above_all = true;
    for (std::uint32_t x = 0; x < ix.n_objects() && above_all; ++x)
      above_all = !ix.hom(x, m).empty();
    if (above_all) return m;
  }
  throw input_error("presentation: no maximum element");
}

FactorizationCertificate equifier_factorize(std::uint32_t f, const NatTransformation& phi,
                                            const NatTransformation& psi,
                                            const FilteredPresentation& p) {
  require_valid(p, "equifier_factorize");
  if (!validate_nat_trans(phi).ok || !validate_nat_trans(psi).ok)
    throw input_error("equifier_factorize: invalid transformation");
  if (!functor_equal(phi.source, psi.source) || !functor_equal(phi.target, psi.target))
    throw input_error("equifier_factorize: transformations are not parallel");
  if (!same_category(phi.source.source, p.stages.target))
    throw input_error("equifier_factorize: presentation lives in a different category");
  const FinCategory& ix = *p.stages.source;
  const FinCategory& k = *p.stages.target;
  const FinFunctor& gv = phi.target;
  const FinCategory& l = *gv.target;
  if (f >= k.n_morphisms()) throw input_error("equifier_factorize: morphism out of range");
  if (k.tgt(f) != p.apex)
    throw input_error("equifier_factorize: morphism does not land in the apex");
  if (phi.component[p.apex] != psi.component[p.apex])
    throw input_error("equifier_factorize: transformations disagree at the apex");

  auto [x, g] = first_factoring_stage(f, p, "equifier_factorize");
  FactorizationCertificate cert;
  cert.chain.push_back(x);
  while (phi.component[p.stages.omap[x]] != psi.component[p.stages.omap[x]]) {
    const std::uint32_t tx = p.stages.omap[x];
    std::optional<std::uint32_t> next;
    std::uint32_t step = 0;
    for (std::uint32_t y = 0; y < ix.n_objects() && !next; ++y) {
      if (y == x || ix.hom(x, y).empty()) continue;
      const std::uint32_t uk = p.stages.mmap[ix.hom(x, y)[0]];
      if (l.compose(gv.mmap[uk], phi.component[tx]) == l.compose(gv.mmap[uk], psi.component[tx])) {
        next = y;
        step = uk;
      }
    }
    if (!next) throw std::logic_error("equifier walk: no admissible next stage");
    g = k.compose(step, g);
    x = *next;
    cert.chain.push_back(x);
  }
  cert.stage = x;
  cert.through = g;
  cert.leg = p.legs[x];
  return cert;
}

bool verify_equifier_certificate(const FactorizationCertificate& c, std::uint32_t f,
                                 const NatTransformation& phi, const NatTransformation& psi,
                                 const FilteredPresentation& p) {
  if (!p.stages.source || !p.stages.target) return false;
  const FinCategory& ix = *p.stages.source;
  const FinCategory& k = *p.stages.target;
  if (c.stage >= ix.n_objects() || c.through >= k.n_morphisms() || f >= k.n_morphisms())
    return false;
  if (c.leg != p.legs[c.stage]) return false;
  const std::uint32_t tx = p.stages.omap[c.stage];
  if (k.src(c.through) != k.src(f) || k.tgt(c.through) != tx) return false;
  if (k.compose(c.leg, c.through) != f) return false;
  if (phi.component[tx] != psi.component[tx]) return false;
  return chain_walks_up(c.chain, c.stage, ix);
}

FactorizationCertificate inserter_factorize(const PentagonInput& in,
                                            const FilteredPresentation& p) {
  require_valid(p, "inserter_factorize");
  if (!validate_functor(in.left).ok || !validate_functor(in.right).ok)
    throw input_error("inserter_factorize: invalid functor");
  if (!same_category(in.left.source, in.right.source) ||
      !same_category(in.left.target, in.right.target))
    throw input_error("inserter_factorize: functors are not parallel");
  if (!same_category(in.left.source, p.stages.target))
    throw input_error("inserter_factorize: presentation lives in a different category");
  const FinCategory& ix = *p.stages.source;
  const FinCategory& k = *p.stages.target;
  const FinCategory& l = *in.left.target;
  if (in.into >= k.n_morphisms() || in.to_apex >= k.n_morphisms() ||
      in.structure >= l.n_morphisms() || in.sigma >= l.n_morphisms())
    throw input_error("inserter_factorize: morphism out of range");
  if (k.tgt(in.to_apex) != p.apex)
    throw input_error("inserter_factorize: morphism does not land in the apex");
  if (k.tgt(in.into) != k.src(in.to_apex))
    throw input_error("inserter_factorize: middle morphisms do not compose");
  if (l.src(in.structure) != in.left.omap[p.apex] ||
      l.tgt(in.structure) != in.right.omap[p.apex])
    throw input_error("inserter_factorize: structure morphism endpoints");
  if (l.src(in.sigma) != in.left.omap[k.src(in.into)] ||
      l.tgt(in.sigma) != in.right.omap[k.src(in.to_apex)])
    throw input_error("inserter_factorize: sigma endpoints");
  if (l.compose(in.structure, in.left.mmap[k.compose(in.to_apex, in.into)]) !=
      l.compose(in.right.mmap[in.to_apex], in.sigma))
    throw input_error("inserter_factorize: pentagon does not commute");

  auto [x, g] = first_factoring_stage(in.to_apex, p, "inserter_factorize");
  FactorizationCertificate cert;
  cert.chain.push_back(x);
  for (;;) {
    const std::uint32_t tx = p.stages.omap[x];
    // F(g . s) and G(g) . sigma stay fixed while scanning this stage
    const std::uint32_t fs = in.left.mmap[k.compose(g, in.into)];
    const std::uint32_t pent = l.compose(in.right.mmap[g], in.sigma);
    const std::uint32_t legx = p.legs[x];
    const std::uint32_t against_leg = l.compose(in.structure, in.left.mmap[legx]);
    for (std::uint32_t cand : l.hom(in.left.omap[tx], in.right.omap[tx]))
      if (l.compose(cand, fs) == pent &&
          l.compose(in.right.mmap[legx], cand) == against_leg) {
        cert.stage = x;
        cert.through = g;
        cert.leg = legx;
        cert.psi = cand;
        return cert;
      }
    std::optional<std::uint32_t> next;
    std::uint32_t step = 0;
    for (std::uint32_t y = 0; y < ix.n_objects() && !next; ++y) {
      if (y == x || ix.hom(x, y).empty()) continue;
      const std::uint32_t uk = p.stages.mmap[ix.hom(x, y)[0]];
      const std::uint32_t hex = l.compose(in.right.mmap[k.compose(uk, g)], in.sigma);
      for (std::uint32_t lift : l.hom(in.left.omap[tx], in.right.omap[p.stages.omap[y]]))
        if (l.compose(in.right.mmap[p.legs[y]], lift) == against_leg &&
            l.compose(lift, fs) == hex) {
          next = y;
          step = uk;
          break;
        }
    }
    if (!next) throw std::logic_error("inserter walk: no admissible next stage");
    g = k.compose(step, g);
    x = *next;
    cert.chain.push_back(x);
    if (cert.chain.size() > ix.n_objects())
      throw std::logic_error("inserter walk: chain exceeded the index");
  }
}

bool verify_inserter_certificate(const FactorizationCertificate& c, const PentagonInput& in,
                                 const FilteredPresentation& p) {
  if (!p.stages.source || !p.stages.target || !in.left.target) return false;
  const FinCategory& ix = *p.stages.source;
  const FinCategory& k = *p.stages.target;
  const FinCategory& l = *in.left.target;
  if (c.stage >= ix.n_objects() || c.through >= k.n_morphisms() || !c.psi) return false;
  if (c.leg != p.legs[c.stage]) return false;
  const std::uint32_t tx = p.stages.omap[c.stage];
  if (k.src(c.through) != k.src(in.to_apex) || k.tgt(c.through) != tx) return false;
  if (k.compose(c.leg, c.through) != in.to_apex) return false;
  if (l.src(*c.psi) != in.left.omap[tx] || l.tgt(*c.psi) != in.right.omap[tx]) return false;
  if (l.compose(*c.psi, in.left.mmap[k.compose(c.through, in.into)]) !=
      l.compose(in.right.mmap[c.through], in.sigma))
    return false;
  if (l.compose(in.right.mmap[c.leg], *c.psi) !=
      l.compose(in.structure, in.left.mmap[c.leg]))
    return false;
  return chain_walks_up(c.chain, c.stage, ix);
}

CanonicalAnalysis inserter_canonical_analysis(const InserterResult& ins,
                                              const PresentationContext& base,
                                              const std::string& e_obj, const Budget& budget) {
  if (!ins.cat || !base.category) throw input_error("canonical analysis: missing category");
  if (!same_category(ins.forgetful.target, base.category))
    throw input_error("canonical analysis: context is not over the inserter base");
  const FinCategory& e = *ins.cat;
  const FinCategory& k = *base.category;
  const std::uint32_t eo = e.object_index(e_obj);

  std::vector<bool> small(k.n_objects(), false);
  for (std::uint32_t o : base.small_objects) small[o] = true;
  PresentationContext lifted;
  lifted.category = ins.cat;
  for (std::uint32_t i = 0; i < e.n_objects(); ++i)
    if (small[ins.forgetful.omap[i]]) lifted.small_objects.push_back(i);

  CanonicalAnalysis out;
  out.over_inserter = canonical_diagram(lifted, e_obj, budget);
  out.over_base = canonical_diagram(base, k.obj_id(ins.forgetful.omap[eo]), budget);

  const FinCategory& de = *out.over_inserter.diagram;
  const FinCategory& dk = *out.over_base.diagram;
  FinFunctor b;
  b.source = out.over_inserter.diagram;
  b.target = out.over_base.diagram;
  b.omap.resize(de.n_objects());
  b.mmap.resize(de.n_morphisms());
  for (std::uint32_t i = 0; i < de.n_objects(); ++i)
    b.omap[i] = dk.object_index(k.mor_id(ins.forgetful.mmap[out.over_inserter.object_of[i]]));
  for (std::uint32_t m = 0; m < de.n_morphisms(); ++m) {
    const std::uint32_t a = ins.forgetful.mmap[out.over_inserter.to_ambient.mmap[m]];
    const std::uint32_t v = ins.forgetful.mmap[out.over_inserter.object_of[de.src(m)]];
    const std::uint32_t w = ins.forgetful.mmap[out.over_inserter.object_of[de.tgt(m)]];
    b.mmap[m] = dk.morphism_index(
        enc_call("tri", {{"a", k.mor_id(a)}, {"src", k.mor_id(v)}, {"tgt", k.mor_id(w)}}));
  }
  out.between = std::move(b);
  out.filtered = is_filtered(de);
  out.cofinal = is_cofinal(out.between);
  return out;
}

MembershipCheck verify_membership_criterion(const PresentationContext& ctx,
                                            const std::vector<std::string>& s_sub,
                                            const std::string& e_obj) {
  if (!ctx.category) throw input_error("membership: missing category");
  const FinCategory& k = *ctx.category;
  const std::uint32_t eo = k.object_index(e_obj);
  std::vector<bool> small(k.n_objects(), false);
  for (std::uint32_t o : ctx.small_objects) small[o] = true;
  std::vector<std::uint32_t> mids;
  for (const std::string& id : s_sub) {
    const std::uint32_t o = k.object_index(id);
    if (!small[o]) throw input_error("membership: " + id + " is not a designated small object");
    mids.push_back(o);
  }
  std::sort(mids.begin(), mids.end());
  mids.erase(std::unique(mids.begin(), mids.end()), mids.end());

  MembershipCheck out;
  for (std::uint32_t t : ctx.small_objects)
    for (std::uint32_t m : k.hom(t, eo)) {
      bool hit = false;
      for (std::size_t si = 0; si < mids.size() && !hit; ++si)
        for (std::uint32_t g : k.hom(t, mids[si])) {
          for (std::uint32_t h : k.hom(mids[si], eo))
            if (k.compose(h, g) == m) {
              hit = true;
              break;
            }
          if (hit) break;
        }
      if (!hit) {
        out.witness = k.mor_id(m);
        return out;
      }
    }
  out.member = true;
  return out;
}

}  // namespace pielim
