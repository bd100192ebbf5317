#include "pielim/compare.hpp"

#include <algorithm>
#include <numeric>

#include "pielim/setdiag.hpp"

namespace pielim {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h + 0x9e3779b97f4a7c15ULL + v;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Colors {
  std::vector<std::uint64_t> obj;
  std::vector<std::uint64_t> mor;
};

// Fixed-round refinement. The result is a deterministic function of the
// structure alone, so corresponding cells of isomorphic categories always
// receive equal colors; hash collisions can only merge colors, which costs
// search time but never correctness.
Colors refine_colors(const FinCategory& c, int rounds) {
  const std::uint32_t n_obj = c.n_objects(), n_mor = c.n_morphisms();
  Colors col;
  col.obj.assign(n_obj, 0x0b5ec7ULL);
  col.mor.assign(n_mor, 0);
  for (std::uint32_t m = 0; m < n_mor; ++m) {
    std::uint64_t h = mix(0x30f, c.is_identity(m) ? 1 : 2);
    h = mix(h, c.inverse(m).has_value() ? 3 : 4);
    h = mix(h, c.src(m) == c.tgt(m) ? 5 : 6);
    col.mor[m] = h;
  }
  for (int r = 0; r < rounds; ++r) {
    // morphism pass: how m behaves as either argument of composition
    std::vector<std::vector<std::uint64_t>> sig(n_mor);
    for (const auto& e : c.comp) {
      auto g = static_cast<std::uint32_t>(e.first >> 32);
      auto f = static_cast<std::uint32_t>(e.first & 0xffffffffu);
      sig[f].push_back(mix(1, mix(col.mor[g], col.mor[e.second])));
      sig[g].push_back(mix(2, mix(col.mor[f], col.mor[e.second])));
    }
    std::vector<std::uint64_t> nmor(n_mor);
    for (std::uint32_t m = 0; m < n_mor; ++m) {
      std::sort(sig[m].begin(), sig[m].end());
      std::uint64_t h = mix(col.mor[m], mix(col.obj[c.src(m)], col.obj[c.tgt(m)]));
      for (auto s : sig[m]) h = mix(h, s);
      nmor[m] = h;
    }
    // object pass from the fresh morphism colors
    std::vector<std::vector<std::uint64_t>> osig(n_obj);
    for (std::uint32_t m = 0; m < n_mor; ++m) {
      osig[c.src(m)].push_back(mix(3, nmor[m]));
      osig[c.tgt(m)].push_back(mix(4, nmor[m]));
    }
    std::vector<std::uint64_t> nobj(n_obj);
    for (std::uint32_t o = 0; o < n_obj; ++o) {
      std::sort(osig[o].begin(), osig[o].end());
      std::uint64_t h = col.obj[o];
      for (auto s : osig[o]) h = mix(h, s);
      nobj[o] = h;
    }
    col.mor = std::move(nmor);
    col.obj = std::move(nobj);
  }
  return col;
}

// Composition table as parallel arrays with lookup by either argument. The
// table is sorted by (left << 32 | right), so entries sharing a left
// argument are contiguous; the right-argument side gets a counting-sort CSR.
struct CompIndex {
  std::vector<std::uint32_t> left, right, result;
  std::vector<std::uint32_t> left_start;   // n_mor + 1
  std::vector<std::uint32_t> right_start;  // n_mor + 1
  std::vector<std::uint32_t> right_order;  // entry indices grouped by right arg
};

CompIndex build_comp_index(const FinCategory& c) {
  CompIndex ix;
  const std::uint32_t n_mor = c.n_morphisms();
  const std::size_t n = c.comp.size();
  ix.left.resize(n);
  ix.right.resize(n);
  ix.result.resize(n);
  ix.left_start.assign(n_mor + 1, 0);
  ix.right_start.assign(n_mor + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ix.left[i] = static_cast<std::uint32_t>(c.comp[i].first >> 32);
    ix.right[i] = static_cast<std::uint32_t>(c.comp[i].first & 0xffffffffu);
    ix.result[i] = c.comp[i].second;
    ++ix.left_start[ix.left[i] + 1];
    ++ix.right_start[ix.right[i] + 1];
  }
  for (std::uint32_t m = 0; m < n_mor; ++m) {
    ix.left_start[m + 1] += ix.left_start[m];
    ix.right_start[m + 1] += ix.right_start[m];
  }
  ix.right_order.resize(n);
  std::vector<std::uint32_t> cur(ix.right_start.begin(), ix.right_start.end() - 1);
  for (std::uint32_t i = 0; i < n; ++i) ix.right_order[cur[ix.right[i]]++] = i;
  return ix;
}

// Greedy generating set in id order: identities are free, and every morphism
// not already in the closure of the chosen ones becomes a generator. The
// closure grows incrementally, so each table entry is scanned at most twice
// over the whole run. Non-identity idempotents select themselves.
std::vector<std::uint32_t> generating_set(const FinCategory& c, const CompIndex& ix) {
  const std::uint32_t n_mor = c.n_morphisms();
  std::vector<char> in(n_mor, 0);
  std::vector<std::uint32_t> work;
  auto close_from = [&](std::uint32_t seed) {
    work.clear();
    work.push_back(seed);
    in[seed] = 1;
    while (!work.empty()) {
      std::uint32_t w = work.back();
      work.pop_back();
      for (std::uint32_t e = ix.left_start[w]; e < ix.left_start[w + 1]; ++e)
        if (in[ix.right[e]] && !in[ix.result[e]]) {
          in[ix.result[e]] = 1;
          work.push_back(ix.result[e]);
        }
      for (std::uint32_t p = ix.right_start[w]; p < ix.right_start[w + 1]; ++p) {
        std::uint32_t e = ix.right_order[p];
        if (in[ix.left[e]] && !in[ix.result[e]]) {
          in[ix.result[e]] = 1;
          work.push_back(ix.result[e]);
        }
      }
    }
  };
  for (std::uint32_t o = 0; o < c.n_objects(); ++o)
    if (!in[c.identity[o]]) close_from(c.identity[o]);
  std::vector<std::uint32_t> gens;
  for (std::uint32_t m = 0; m < n_mor; ++m)
    if (!in[m]) {
      gens.push_back(m);
      close_from(m);
    }
  return gens;
}

struct IsoSearch {
  const FinCategory& a;
  const FinCategory& b;
  const CompIndex& ix;
  const Colors& col_a;
  const Colors& col_b;
  const std::vector<std::uint32_t>& gens;
  BudgetMeter& meter;
  std::uint64_t nodes = 0;

  std::vector<std::uint32_t> obj_img;
  std::vector<char> obj_used;
  std::vector<std::int32_t> img;  // -1 = unassigned
  std::vector<char> used;

  // candidate B objects grouped by color, and A objects ordered rarest first
  std::vector<std::uint32_t> obj_order;
  std::vector<std::vector<std::uint32_t>> obj_cands;  // per position in obj_order

  bool assign(std::uint32_t m, std::uint32_t v, std::vector<std::uint32_t>& trail) {
    if (img[m] >= 0) return static_cast<std::uint32_t>(img[m]) == v;
    if (used[v]) return false;
    if (col_a.mor[m] != col_b.mor[v]) return false;
    if (obj_img[a.src(m)] != b.src(v) || obj_img[a.tgt(m)] != b.tgt(v)) return false;
    img[m] = static_cast<std::int32_t>(v);
    used[v] = 1;
    trail.push_back(m);
    return true;
  }

  bool propagate(std::vector<std::uint32_t>& queue, std::vector<std::uint32_t>& trail) {
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::uint32_t w = queue[qi];
      auto wv = static_cast<std::uint32_t>(img[w]);
      for (std::uint32_t e = ix.left_start[w]; e < ix.left_start[w + 1]; ++e) {
        std::uint32_t f = ix.right[e], h = ix.result[e];
        if (img[f] < 0) continue;
        auto c = b.compose_opt(wv, static_cast<std::uint32_t>(img[f]));
        if (!c) return false;
        if (img[h] < 0) {
          if (!assign(h, *c, trail)) return false;
          queue.push_back(h);
        } else if (static_cast<std::uint32_t>(img[h]) != *c) {
          return false;
        }
      }
      for (std::uint32_t p = ix.right_start[w]; p < ix.right_start[w + 1]; ++p) {
        std::uint32_t e = ix.right_order[p];
        std::uint32_t g = ix.left[e], h = ix.result[e];
        if (img[g] < 0) continue;
        auto c = b.compose_opt(static_cast<std::uint32_t>(img[g]), wv);
        if (!c) return false;
        if (img[h] < 0) {
          if (!assign(h, *c, trail)) return false;
          queue.push_back(h);
        } else if (static_cast<std::uint32_t>(img[h]) != *c) {
          return false;
        }
      }
    }
    return true;
  }

  bool verify() const {
    for (std::uint32_t m = 0; m < a.n_morphisms(); ++m)
      if (img[m] < 0) return false;
    for (std::size_t e = 0; e < ix.left.size(); ++e) {
      auto c = b.compose_opt(static_cast<std::uint32_t>(img[ix.left[e]]),
                             static_cast<std::uint32_t>(img[ix.right[e]]));
      if (!c || *c != static_cast<std::uint32_t>(img[ix.result[e]])) return false;
    }
    return true;
  }

  bool mor_dfs(std::size_t gi, std::vector<std::uint32_t>& trail) {
    if (gi == gens.size()) return verify();
    std::uint32_t m = gens[gi];
    if (img[m] >= 0) return mor_dfs(gi + 1, trail);
    const auto& cands = b.hom(obj_img[a.src(m)], obj_img[a.tgt(m)]);
    for (std::uint32_t v : cands) {
      if (used[v] || col_b.mor[v] != col_a.mor[m]) continue;
      meter.spend(1, "compare");
      ++nodes;
      std::vector<std::uint32_t> local;
      std::vector<std::uint32_t> queue;
      if (assign(m, v, local)) {
        queue.push_back(m);
        if (propagate(queue, local) && mor_dfs(gi + 1, local)) {
          trail.insert(trail.end(), local.begin(), local.end());
          return true;
        }
      }
      for (auto t : local) {
        used[static_cast<std::uint32_t>(img[t])] = 0;
        img[t] = -1;
      }
    }
    return false;
  }

  bool mor_phase() {
    img.assign(a.n_morphisms(), -1);
    used.assign(b.n_morphisms(), 0);
    std::vector<std::uint32_t> trail;
    std::vector<std::uint32_t> queue;
    for (std::uint32_t o = 0; o < a.n_objects(); ++o) {
      std::uint32_t ia = a.identity[o];
      if (!assign(ia, b.identity[obj_img[o]], trail)) return false;
      queue.push_back(ia);
    }
    if (!propagate(queue, trail)) return false;
    return mor_dfs(0, trail);
  }

  bool obj_dfs(std::size_t pos) {
    if (pos == obj_order.size()) return mor_phase();
    std::uint32_t o = obj_order[pos];
    for (std::uint32_t v : obj_cands[pos]) {
      if (obj_used[v]) continue;
      meter.spend(1, "compare");
      ++nodes;
      obj_img[o] = v;
      obj_used[v] = 1;
      if (obj_dfs(pos + 1)) return true;
      obj_used[v] = 0;
    }
    return false;
  }

  bool run() {
    const std::uint32_t n_obj = a.n_objects();
    obj_img.assign(n_obj, 0);
    obj_used.assign(n_obj, 0);

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_color;
    for (std::uint32_t v = 0; v < n_obj; ++v) by_color[col_b.obj[v]].push_back(v);

    obj_order.resize(n_obj);
    std::iota(obj_order.begin(), obj_order.end(), 0u);
    std::sort(obj_order.begin(), obj_order.end(), [&](std::uint32_t x, std::uint32_t y) {
      std::size_t cx = by_color[col_a.obj[x]].size(), cy = by_color[col_a.obj[y]].size();
      if (cx != cy) return cx < cy;
      if (col_a.obj[x] != col_a.obj[y]) return col_a.obj[x] < col_a.obj[y];
      return x < y;
    });
    obj_cands.clear();
    for (std::uint32_t o : obj_order) obj_cands.push_back(by_color[col_a.obj[o]]);

    return obj_dfs(0);
  }
};

FinFunctor invert_iso(const FinFunctor& f) {
  FinFunctor inv;
  inv.source = f.target;
  inv.target = f.source;
  inv.omap.resize(f.target->n_objects());
  inv.mmap.resize(f.target->n_morphisms());
  for (std::uint32_t o = 0; o < f.source->n_objects(); ++o) inv.omap[f.omap[o]] = o;
  for (std::uint32_t m = 0; m < f.source->n_morphisms(); ++m) inv.mmap[f.mmap[m]] = m;
  return inv;
}

FinFunctor identity_onto(const CatPtr& a, const CatPtr& b) {
  FinFunctor f;
  f.source = a;
  f.target = b;
  f.omap.resize(a->n_objects());
  f.mmap.resize(a->n_morphisms());
  std::iota(f.omap.begin(), f.omap.end(), 0u);
  std::iota(f.mmap.begin(), f.mmap.end(), 0u);
  return f;
}

// Conjugate through the chosen isos and transport along the skeleton iso:
//   F(x) = sigma(rep(x)),  F(f: x -> y) = sigma(r_y . f . r_x^{-1}).
FinFunctor equivalence_witness(const CatPtr& a, const CatPtr& b, const Skeleton& sa,
                               const Skeleton& sb, const FinFunctor& sigma) {
  FinFunctor out;
  out.source = a;
  out.target = b;
  out.omap.resize(a->n_objects());
  out.mmap.resize(a->n_morphisms());
  for (std::uint32_t x = 0; x < a->n_objects(); ++x) {
    std::uint32_t sk = sa.cat->object_index(a->obj_id(sa.rep[x]));
    out.omap[x] = b->object_index(sb.cat->obj_id(sigma.omap[sk]));
  }
  for (std::uint32_t f = 0; f < a->n_morphisms(); ++f) {
    std::uint32_t rx_inv = *a->inverse(sa.to_rep[a->src(f)]);
    std::uint32_t m = a->compose(sa.to_rep[a->tgt(f)], a->compose(f, rx_inv));
    std::uint32_t sk = sa.cat->morphism_index(a->mor_id(m));
    out.mmap[f] = b->morphism_index(sb.cat->mor_id(sigma.mmap[sk]));
  }
  return out;
}

bool essentially_surjective(const FinFunctor& f, const Skeleton& sb) {
  std::vector<char> class_hit(f.target->n_objects(), 0);
  for (auto o : f.omap) class_hit[sb.rep[o]] = 1;
  for (std::uint32_t o = 0; o < f.target->n_objects(); ++o)
    if (!class_hit[sb.rep[o]]) return false;
  return true;
}

}  // namespace

Skeleton skeleton_of(const CatPtr& c) {
  const std::uint32_t n_obj = c->n_objects();
  std::vector<std::uint32_t> parent(n_obj);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::uint32_t m = 0; m < c->n_morphisms(); ++m)
    if (c->src(m) != c->tgt(m) && c->inverse(m).has_value())
      parent[find(c->src(m))] = find(c->tgt(m));

  // objects are sorted by id, so the least index in a class is the lex-least id
  std::vector<std::uint32_t> min_of(n_obj, n_obj);
  for (std::uint32_t o = 0; o < n_obj; ++o) {
    std::uint32_t r = find(o);
    if (min_of[r] == n_obj) min_of[r] = o;
  }
  Skeleton out;
  out.rep.resize(n_obj);
  out.to_rep.resize(n_obj);
  std::vector<std::uint32_t> reps;
  for (std::uint32_t o = 0; o < n_obj; ++o) {
    out.rep[o] = min_of[find(o)];
    if (out.rep[o] == o) {
      out.to_rep[o] = c->identity[o];
      reps.push_back(o);
      continue;
    }
    // isos compose inside the category, so a one-step iso to the rep exists
    bool found = false;
    for (std::uint32_t m : c->hom(o, out.rep[o]))
      if (c->inverse(m).has_value()) {
        out.to_rep[o] = m;
        found = true;
        break;
      }
    if (!found) throw std::logic_error("skeleton: no iso to class representative");
  }
  out.cat = full_subcategory(c, reps, c->name + "-skeleton").cat;
  return out;
}

CompareResult compare_categories(const CatPtr& a, const CatPtr& b, CompareMode mode,
                                 BudgetMeter& meter) {
  if (mode == CompareMode::Equivalence) {
    Skeleton sa = skeleton_of(a);
    Skeleton sb = skeleton_of(b);
    CompareResult inner = compare_categories(sa.cat, sb.cat, CompareMode::Isomorphism, meter);
    CompareResult out;
    out.mode = "equivalence";
    out.nodes = inner.nodes;
    if (!inner.match) {
      out.detail = "skeletons are not isomorphic: " + inner.detail;
      return out;
    }
    FinFunctor w = equivalence_witness(a, b, sa, sb, *inner.witness);
    if (!validate_functor(w).ok || !is_fully_faithful(w) || !essentially_surjective(w, sb))
      throw std::logic_error("compare: equivalence witness failed verification");
    out.match = true;
    out.witness = std::move(w);
    out.detail = "witness is fully faithful and essentially surjective";
    return out;
  }

  CompareResult out;
  out.mode = "iso";
  if (a->n_objects() != b->n_objects()) {
    out.detail = "object counts differ";
    return out;
  }
  if (a->n_morphisms() != b->n_morphisms()) {
    out.detail = "morphism counts differ";
    return out;
  }
  if (a->comp.size() != b->comp.size()) {
    out.detail = "composition table sizes differ";
    return out;
  }
  if (same_category(a, b)) {
    out.match = true;
    out.witness = identity_onto(a, b);
    out.witness_inverse = identity_onto(b, a);
    return out;
  }

  const int rounds = std::max(a->comp.size(), b->comp.size()) > 2'000'000 ? 3 : 6;
  Colors col_a = refine_colors(*a, rounds);
  Colors col_b = refine_colors(*b, rounds);
  {
    auto ha = col_a.obj, hb = col_b.obj;
    std::sort(ha.begin(), ha.end());
    std::sort(hb.begin(), hb.end());
    if (ha != hb) {
      out.detail = "object color histograms differ";
      return out;
    }
    auto ma = col_a.mor, mb = col_b.mor;
    std::sort(ma.begin(), ma.end());
    std::sort(mb.begin(), mb.end());
    if (ma != mb) {
      out.detail = "morphism color histograms differ";
      return out;
    }
  }

  CompIndex ix = build_comp_index(*a);
  std::vector<std::uint32_t> gens = generating_set(*a, ix);
  IsoSearch search{*a, *b, ix, col_a, col_b, gens, meter, 0, {}, {}, {}, {}, {}, {}};
  bool found = search.run();
  out.nodes = search.nodes;
  if (!found) {
    out.detail = "exhaustive search found no isomorphism";
    return out;
  }

  FinFunctor w;
  w.source = a;
  w.target = b;
  w.omap = search.obj_img;
  w.mmap.resize(a->n_morphisms());
  for (std::uint32_t m = 0; m < a->n_morphisms(); ++m)
    w.mmap[m] = static_cast<std::uint32_t>(search.img[m]);
  FinFunctor inv = invert_iso(w);
  if (!validate_functor(w).ok || !validate_functor(inv).ok || !functor_is_iso(w))
    throw std::logic_error("compare: iso witness failed verification");
  out.match = true;
  out.witness = std::move(w);
  out.witness_inverse = std::move(inv);
  return out;
}

}  // namespace pielim
