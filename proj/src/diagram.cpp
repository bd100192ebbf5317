#include "pielim/diagram.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "enumtools.hpp"

namespace pielim {

namespace {

using namespace detail;

}  // namespace

// ---------------------------------------------------------------------------
// Functor categories

std::uint64_t count_functors(const CatPtr& c, const CatPtr& k, const Budget& budget) {
  if (!c || !k) throw input_error("count_functors: null category");
  BudgetMeter meter(budget);
  std::uint64_t n = 0;
  for_each_functor(c, k, meter,
                   [&](const std::vector<std::uint32_t>&, const std::vector<std::uint32_t>&) { ++n; });
  return n;
}

FunCategoryResult fun_category_direct(const CatPtr& c, const CatPtr& k, const Budget& budget) {
  if (!c || !k) throw input_error("fun_category_direct: null category");
  BudgetMeter meter(budget);
  const FinCategory& kc = *k;
  const std::uint32_t nobj_c = c->n_objects();

  std::vector<FinFunctor> fns;
  std::vector<std::string> fids;
  for_each_functor(c, k, meter,
                   [&](const std::vector<std::uint32_t>& omap, const std::vector<std::uint32_t>& mmap) {
                     std::vector<std::string> oids(omap.size()), mids(mmap.size());
                     for (std::size_t i = 0; i < omap.size(); ++i) oids[i] = kc.obj_id(omap[i]);
                     for (std::size_t i = 0; i < mmap.size(); ++i) mids[i] = kc.mor_id(mmap[i]);
                     fids.push_back(enc_call("fun", {{"o", enc_tuple(oids)}, {"m", enc_tuple(mids)}}));
                     FinFunctor f;
                     f.source = c;
                     f.target = k;
                     f.omap = omap;
                     f.mmap = mmap;
                     fns.push_back(std::move(f));
                     meter.check_objects(fns.size(), "functor enumeration");
                   });

  const auto nfun = static_cast<std::uint32_t>(fns.size());
  std::vector<std::uint32_t> nonid;
  for (std::uint32_t m = 0; m < c->n_morphisms(); ++m)
    if (!c->is_identity(m)) nonid.push_back(m);

  if (static_cast<std::uint64_t>(nfun) * nfun > meter.limits.candidates)
    throw resource_error("candidate budget exceeded in natural transformation enumeration");
  std::vector<TupleBucket> buckets(static_cast<std::size_t>(nfun) * nfun);
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<std::array<std::uint32_t, 2>> ends;

  for (std::uint32_t fi = 0; fi < nfun; ++fi) {
    for (std::uint32_t gi = 0; gi < nfun; ++gi) {
      TupleBucket& b = buckets[static_cast<std::size_t>(fi) * nfun + gi];
      b.base = static_cast<std::uint32_t>(comps.size());
      b.cands.resize(nobj_c);
      std::vector<std::size_t> sizes(nobj_c);
      for (std::uint32_t o = 0; o < nobj_c; ++o) {
        b.cands[o] = &kc.hom(fns[fi].omap[o], fns[gi].omap[o]);
        sizes[o] = b.cands[o]->size();
      }
      b.strides = suffix_strides(sizes);
      std::uint64_t next_rank = 0;
      std::vector<std::uint32_t> at(nobj_c);
      odometer_pos(sizes, [&](const std::vector<std::size_t>& pos) {
        meter.spend(1, "natural transformation enumeration");
        const std::uint64_t rk = next_rank++;
        for (std::uint32_t o = 0; o < nobj_c; ++o) at[o] = (*b.cands[o])[pos[o]];
        for (std::uint32_t m : nonid)
          if (kc.compose(fns[gi].mmap[m], at[c->src(m)]) !=
              kc.compose(at[c->tgt(m)], fns[fi].mmap[m]))
            return;
        b.kept.push_back(rk);
        comps.push_back(at);
        ends.push_back({fi, gi});
        meter.check_morphisms(comps.size(), "natural transformation enumeration");
      });
    }
  }

  AssembleInput ai;
  ai.name = "fun(" + c->name + "," + k->name + ")";
  ai.prov = Provenance{"fun-category", {{"C", c->digest_hex()}, {"K", k->digest_hex()}}};
  ai.objects = fids;
  std::vector<std::string> nids(comps.size());
  ai.morphisms.reserve(comps.size());
  for (std::uint32_t i = 0; i < comps.size(); ++i) {
    std::vector<std::string> at(nobj_c);
    for (std::uint32_t o = 0; o < nobj_c; ++o) at[o] = kc.mor_id(comps[i][o]);
    nids[i] = enc_call(
        "nat", {{"src", fids[ends[i][0]]}, {"tgt", fids[ends[i][1]]}, {"at", enc_tuple(at)}});
    ai.morphisms.push_back({nids[i], ends[i][0], ends[i][1]});
  }

  ai.identity.resize(nfun);
  for (std::uint32_t fi = 0; fi < nfun; ++fi) {
    const TupleBucket& b = buckets[static_cast<std::size_t>(fi) * nfun + fi];
    std::vector<std::uint32_t> at(nobj_c);
    for (std::uint32_t o = 0; o < nobj_c; ++o) at[o] = kc.identity[fns[fi].omap[o]];
    ai.identity[fi] = bucket_find(b, bucket_rank(b, at), "fun: identity transformation not enumerated");
  }

  std::uint64_t n_comp = 0;
  std::vector<std::uint32_t> at(nobj_c);
  for (std::uint32_t fi = 0; fi < nfun; ++fi)
    for (std::uint32_t gi = 0; gi < nfun; ++gi) {
      const TupleBucket& b1 = buckets[static_cast<std::size_t>(fi) * nfun + gi];
      if (b1.kept.empty()) continue;
      for (std::uint32_t hi = 0; hi < nfun; ++hi) {
        const TupleBucket& b2 = buckets[static_cast<std::size_t>(gi) * nfun + hi];
        if (b2.kept.empty()) continue;
        const TupleBucket& b3 = buckets[static_cast<std::size_t>(fi) * nfun + hi];
        const auto e1 = b1.base + static_cast<std::uint32_t>(b1.kept.size());
        const auto e2 = b2.base + static_cast<std::uint32_t>(b2.kept.size());
        for (std::uint32_t i1 = b1.base; i1 < e1; ++i1)
          for (std::uint32_t i2 = b2.base; i2 < e2; ++i2) {
            meter.spend(1, "functor category composition");
            ++n_comp;
            meter.check_comp(n_comp, "functor category composition");
            for (std::uint32_t o = 0; o < nobj_c; ++o)
              at[o] = kc.compose(comps[i2][o], comps[i1][o]);
            ai.comp.push_back(
                {i2, i1, bucket_find(b3, bucket_rank(b3, at), "fun: composite not enumerated")});
          }
      }
    }

  FunCategoryResult out;
  out.cat = assemble_category(std::move(ai), &meter);
  out.functors.resize(nfun);
  out.components.resize(comps.size());
  for (std::uint32_t i = 0; i < nfun; ++i)
    out.functors[out.cat->object_index(fids[i])] = std::move(fns[i]);
  for (std::uint32_t i = 0; i < comps.size(); ++i)
    out.components[out.cat->morphism_index(nids[i])] = std::move(comps[i]);
  return out;
}

TupleSpec fun_category_pie_spec(const CatPtr& c, const CatPtr& k) {
  if (!c || !k) throw input_error("fun_category_pie_spec: null category");
  TupleSpec s;
  s.name = "fun-pie(" + c->name + "," + k->name + ")";
  s.factors.assign(c->n_objects(), k);
  for (std::uint32_t m = 0; m < c->n_morphisms(); ++m)
    s.slots.push_back({c->src(m), c->tgt(m), identity_functor(k), identity_functor(k)});
  s.families.push_back({"composition", [c, k](const TupleObject& t) {
                          for (const auto& [key, gf] : c->comp) {
                            auto g = static_cast<std::uint32_t>(key >> 32);
                            auto f = static_cast<std::uint32_t>(key & 0xffffffffu);
                            if (k->compose(t.structure[g], t.structure[f]) != t.structure[gf])
                              return false;
                          }
                          return true;
                        }});
  s.families.push_back({"identity", [c, k](const TupleObject& t) {
                          for (std::uint32_t o = 0; o < c->n_objects(); ++o)
                            if (t.structure[c->identity[o]] != k->identity[t.carrier[o]])
                              return false;
                          return true;
                        }});
  s.prov = Provenance{"fun-category-via-pie", {{"C", c->digest_hex()}, {"K", k->digest_hex()}}};
  return s;
}

FunCategoryPie fun_category_via_pie(const CatPtr& c, const CatPtr& k, const Budget& budget) {
  FunCategoryPie out;
  out.direct = fun_category_direct(c, k, budget);
  out.pie = build_tuple_category(fun_category_pie_spec(c, k), budget);

  const FinCategory& dc = *out.direct.cat;
  std::vector<std::vector<std::uint32_t>> obj_key(dc.n_objects());
  for (std::uint32_t i = 0; i < dc.n_objects(); ++i) {
    const FinFunctor& f = out.direct.functors[i];
    obj_key[i] = f.omap;
    obj_key[i].insert(obj_key[i].end(), f.mmap.begin(), f.mmap.end());
  }
  out.witness = data_witness(out.direct.cat, out.pie, obj_key, out.direct.components,
                             "fun: pipeline output does not match the direct build");
  return out;
}

// ---------------------------------------------------------------------------
// Quivers and k-linear presentations

std::uint32_t Quiver::vertex_index(const std::string& v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v) throw input_error("unknown vertex: " + v);
  return static_cast<std::uint32_t>(it - vertices.begin());
}

std::uint32_t Quiver::arrow_index(const std::string& a) const {
  auto it = std::lower_bound(arrows.begin(), arrows.end(), a,
                             [](const QuiverArrow& x, const std::string& s) { return x.id < s; });
  if (it == arrows.end() || it->id != a) throw input_error("unknown arrow: " + a);
  return static_cast<std::uint32_t>(it - arrows.begin());
}

Quiver make_quiver(std::vector<std::string> vertices,
                   const std::vector<std::array<std::string, 3>>& arrows) {
  Quiver q;
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw input_error("duplicate vertex id");
  q.vertices = std::move(vertices);
  for (const auto& a : arrows)
    q.arrows.push_back({a[0], q.vertex_index(a[1]), q.vertex_index(a[2])});
  std::sort(q.arrows.begin(), q.arrows.end(),
            [](const QuiverArrow& x, const QuiverArrow& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < q.arrows.size(); ++i)
    if (q.arrows[i - 1].id == q.arrows[i].id) throw input_error("duplicate arrow id");

  std::vector<std::uint32_t> indeg(q.vertices.size(), 0);
  for (const QuiverArrow& a : q.arrows) ++indeg[a.tgt];
  std::vector<std::uint32_t> ready;
  for (std::uint32_t v = 0; v < q.vertices.size(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::uint32_t v = ready.back();
    ready.pop_back();
    ++seen;
    for (const QuiverArrow& a : q.arrows)
      if (a.src == v && --indeg[a.tgt] == 0) ready.push_back(a.tgt);
  }
  q.acyclic = seen == q.vertices.size();
  return q;
}

std::string render_path(const Quiver& q, std::uint32_t src, const Path& path) {
  if (path.empty()) return "e(" + q.vertices[src] + ")";
  std::string out;
  for (std::size_t i = path.size(); i-- > 0;) {
    out += q.arrows[path[i]].id;
    if (i) out += "*";
  }
  return out;
}

std::string render_relation(const Quiver& q, const Relation& r) {
  if (r.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    const auto& [cf, p] = r.terms[i];
    if (cf < 0)
      out += "-";
    else if (i)
      out += "+";
    const std::uint64_t mag =
        cf < 0 ? 0ull - static_cast<std::uint64_t>(cf) : static_cast<std::uint64_t>(cf);
    if (mag != 1) out += std::to_string(mag) + "*";
    out += render_path(q, r.src, p);
  }
  return out;
}

namespace {

bool is_prime_u32(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint64_t i = 2; i * i <= p; ++i)
    if (p % i == 0) return false;
  return true;
}

void require_ring(const RingSpec& ring) {
  if (ring.modular) {
    if (!is_prime_u32(ring.p)) throw input_error("modular coefficients need a prime modulus");
    if (ring.p >= (1u << 15)) throw input_error("modulus too large for dense enumeration");
  } else if (ring.p != 0) {
    throw input_error("integer coefficients take p = 0");
  }
}

void require_relation(const Quiver& q, const Relation& r) {
  if (r.src >= q.vertices.size() || r.tgt >= q.vertices.size())
    throw input_error("relation endpoint out of range");
  for (const auto& [cf, p] : r.terms) {
    std::uint32_t at = r.src;
    for (std::uint32_t a : p) {
      if (a >= q.arrows.size()) throw input_error("relation path uses an unknown arrow");
      if (q.arrows[a].src != at) throw input_error("relation path is not composable");
      at = q.arrows[a].tgt;
    }
    if (at != r.tgt) throw input_error("relation term does not land at the relation target");
  }
}

bool path_less(const Path& x, const Path& y) {
  if (x.size() != y.size()) return x.size() < y.size();
  return x < y;
}

// Echelon row set over the fixed path basis: Gaussian elimination with unit
// pivots over a prime field, gcd-based Hermite reduction over the integers.
// finalize() back-substitutes so reduce() yields canonical normal forms.
struct RowReducer {
  bool modular = false;
  std::int64_t p = 0;
  std::vector<std::vector<std::int64_t>> rows;  // pivot columns strictly increase

  static std::size_t lead(const std::vector<std::int64_t>& v) {
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] != 0) return j;
    return v.size();
  }

  std::int64_t norm(std::int64_t x) const { return ((x % p) + p) % p; }

  void axpy(std::vector<std::int64_t>& x, std::int64_t c, const std::vector<std::int64_t>& y) const {
    if (modular) {
      const std::int64_t cm = ((c % p) + p) % p;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = norm(x[i] + cm * y[i]);
      return;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      __int128 t = static_cast<__int128>(x[i]) + static_cast<__int128>(c) * y[i];
      if (t > std::numeric_limits<std::int64_t>::max() ||
          t < std::numeric_limits<std::int64_t>::min())
        throw resource_error("integer coefficient overflow during reduction");
      x[i] = static_cast<std::int64_t>(t);
    }
  }

  std::int64_t inv_mod(std::int64_t a) const {
    std::int64_t r = 1, b = norm(a), e = p - 2;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  }

  void add(std::vector<std::int64_t> v) {
    if (modular)
      for (auto& x : v) x = norm(x);
    std::size_t r = 0;
    for (;;) {
      const std::size_t j = lead(v);
      if (j == v.size()) return;
      while (r < rows.size() && lead(rows[r]) < j) ++r;
      if (r == rows.size() || lead(rows[r]) > j) {
        if (modular) {
          const std::int64_t iv = inv_mod(v[j]);
          for (auto& x : v) x = x * iv % p;
        } else if (v[j] < 0) {
          for (auto& x : v) x = -x;
        }
        rows.insert(rows.begin() + static_cast<std::ptrdiff_t>(r), std::move(v));
        return;
      }
      if (modular) {
        axpy(v, -v[j], rows[r]);  // pivot is 1
      } else {
        while (v[j] != 0) {
          const std::int64_t q = v[j] / rows[r][j];
          if (q != 0) axpy(v, -q, rows[r]);
          if (v[j] != 0) std::swap(v, rows[r]);
        }
        if (rows[r][j] < 0)
          for (auto& x : rows[r]) x = -x;
      }
    }
  }

  void finalize() {
    for (std::size_t r = rows.size(); r-- > 0;) {
      const std::size_t j = lead(rows[r]);
      for (std::size_t r2 = 0; r2 < r; ++r2) {
        if (rows[r2][j] == 0) continue;
        if (modular) {
          axpy(rows[r2], -rows[r2][j], rows[r]);
        } else {
          std::int64_t q = rows[r2][j] / rows[r][j];
          if (rows[r2][j] % rows[r][j] != 0 && rows[r2][j] < 0) --q;
          if (q != 0) axpy(rows[r2], -q, rows[r]);
        }
      }
    }
  }
};

std::vector<std::int64_t> reduce_by_rows(bool modular, std::int64_t p,
                                         const std::vector<std::vector<std::int64_t>>& rows,
                                         std::vector<std::int64_t> v) {
  RowReducer red{modular, p, {}};
  if (modular)
    for (auto& x : v) x = red.norm(x);
  for (const auto& row : rows) {
    const std::size_t j = RowReducer::lead(row);
    if (j == row.size() || v[j] == 0) continue;
    if (modular) {
      red.axpy(v, -v[j], row);
    } else {
      std::int64_t q = v[j] / row[j];
      if (v[j] % row[j] != 0 && v[j] < 0) --q;
      if (q != 0) red.axpy(v, -q, row);
    }
  }
  return v;
}

}  // namespace

std::uint32_t LinearCategory::path_index(std::uint32_t a, std::uint32_t b, const Path& p) const {
  const auto& bs = basis[a][b];
  auto it = std::lower_bound(bs.begin(), bs.end(), p, path_less);
  if (it == bs.end() || *it != p) throw input_error("path is not a basis element of this hom-pair");
  return static_cast<std::uint32_t>(it - bs.begin());
}

std::vector<std::int64_t> LinearCategory::reduce(std::uint32_t a, std::uint32_t b,
                                                 std::vector<std::int64_t> v) const {
  if (v.size() != basis[a][b].size()) throw input_error("coefficient vector has the wrong length");
  return reduce_by_rows(ring.modular, static_cast<std::int64_t>(ring.p), ideal[a][b],
                        std::move(v));
}

std::uint32_t LinearCategory::hom_rank(std::uint32_t a, std::uint32_t b) const {
  return static_cast<std::uint32_t>(basis[a][b].size() - ideal[a][b].size());
}

LinearCategory free_path_category(const Quiver& q, const RingSpec& ring, const Budget& budget) {
  require_ring(ring);
  if (!q.acyclic) throw input_error("free path category needs an acyclic quiver");
  BudgetMeter meter(budget);
  const auto n = static_cast<std::uint32_t>(q.vertices.size());

  LinearCategory lc;
  lc.ring = ring;
  lc.quiver = q;
  lc.basis.assign(n, std::vector<std::vector<Path>>(n));
  lc.ideal.assign(n, std::vector<std::vector<std::vector<std::int64_t>>>(n));

  for (std::uint32_t a = 0; a < n; ++a) {
    std::vector<std::pair<Path, std::uint32_t>> queue{{Path{}, a}};
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Path path = queue[head].first;
      const std::uint32_t at = queue[head].second;
      meter.spend(1, "path enumeration");
      lc.basis[a][at].push_back(path);
      for (std::uint32_t ar = 0; ar < q.arrows.size(); ++ar)
        if (q.arrows[ar].src == at) {
          Path ext = path;
          ext.push_back(ar);
          queue.emplace_back(std::move(ext), q.arrows[ar].tgt);
        }
    }
  }
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      std::sort(lc.basis[a][b].begin(), lc.basis[a][b].end(), path_less);
  return lc;
}

LinearCategory quotient_by_relations(const LinearCategory& b, std::vector<Relation> rels,
                                     const Budget& budget) {
  BudgetMeter meter(budget);
  LinearCategory a = b;
  const auto n = static_cast<std::uint32_t>(a.quiver.vertices.size());

  for (Relation& r : rels) {
    require_relation(a.quiver, r);
    if (a.ring.modular) {
      const auto p = static_cast<std::int64_t>(a.ring.p);
      for (auto& t : r.terms) t.first = ((t.first % p) + p) % p;
    }
    std::erase_if(r.terms, [](const auto& t) { return t.first == 0; });
    if (!r.terms.empty()) a.relations.push_back(std::move(r));
  }

  // regenerate every hom-pair ideal from the full relation list
  for (std::uint32_t ha = 0; ha < n; ++ha)
    for (std::uint32_t hb = 0; hb < n; ++hb) {
      RowReducer red{a.ring.modular, static_cast<std::int64_t>(a.ring.p), {}};
      for (const Relation& r : a.relations)
        for (const Path& pre : a.basis[ha][r.src])
          for (const Path& post : a.basis[r.tgt][hb]) {
            meter.spend(1, "ideal generation");
            std::vector<std::int64_t> row(a.basis[ha][hb].size(), 0);
            for (const auto& [cf, tp] : r.terms) {
              Path full = pre;
              full.insert(full.end(), tp.begin(), tp.end());
              full.insert(full.end(), post.begin(), post.end());
              row[a.path_index(ha, hb, full)] += cf;
            }
            red.add(std::move(row));
          }
      red.finalize();
      a.ideal[ha][hb] = std::move(red.rows);
    }

  // composition descends to normal forms; checked on all composable basis pairs
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t y = 0; y < n; ++y)
      for (std::uint32_t z = 0; z < n; ++z)
        for (std::size_t ip = 0; ip < a.basis[x][y].size(); ++ip)
          for (std::size_t iq = 0; iq < a.basis[y][z].size(); ++iq) {
            meter.spend(1, "quotient coherence");
            const Path& pp = a.basis[x][y][ip];
            const Path& qq = a.basis[y][z][iq];
            Path qp = pp;
            qp.insert(qp.end(), qq.begin(), qq.end());
            std::vector<std::int64_t> direct(a.basis[x][z].size(), 0);
            direct[a.path_index(x, z, qp)] = 1;
            direct = a.reduce(x, z, std::move(direct));

            std::vector<std::int64_t> nf(a.basis[x][y].size(), 0);
            nf[ip] = 1;
            nf = a.reduce(x, y, std::move(nf));
            std::vector<std::int64_t> left(a.basis[x][z].size(), 0);
            for (std::size_t cp = 0; cp < nf.size(); ++cp) {
              if (nf[cp] == 0) continue;
              Path comb = a.basis[x][y][cp];
              comb.insert(comb.end(), qq.begin(), qq.end());
              left[a.path_index(x, z, comb)] += nf[cp];
            }
            left = a.reduce(x, z, std::move(left));
            if (left != direct)
              throw std::logic_error("quotient: composition not well defined on normal forms");

            std::vector<std::int64_t> ng(a.basis[y][z].size(), 0);
            ng[iq] = 1;
            ng = a.reduce(y, z, std::move(ng));
            std::vector<std::int64_t> right(a.basis[x][z].size(), 0);
            for (std::size_t cq = 0; cq < ng.size(); ++cq) {
              if (ng[cq] == 0) continue;
              Path comb = pp;
              const Path& tail = a.basis[y][z][cq];
              comb.insert(comb.end(), tail.begin(), tail.end());
              right[a.path_index(x, z, comb)] += ng[cq];
            }
            right = a.reduce(x, z, std::move(right));
            if (right != direct)
              throw std::logic_error("quotient: composition not well defined on normal forms");
          }
  return a;
}

std::pair<Quiver, std::vector<Relation>> complex_presentation(int n0, int n1) {
  if (n0 >= n1) throw input_error("complex window needs n0 < n1");
  std::vector<std::string> vs;
  std::vector<std::array<std::string, 3>> as;
  for (int v = n0; v <= n1; ++v) vs.push_back(std::to_string(v));
  for (int v = n0; v < n1; ++v)
    as.push_back({"d" + std::to_string(v), std::to_string(v), std::to_string(v + 1)});
  Quiver q = make_quiver(std::move(vs), as);
  std::vector<Relation> rels;
  for (int v = n0; v + 2 <= n1; ++v) {
    Relation r;
    r.src = q.vertex_index(std::to_string(v));
    r.tgt = q.vertex_index(std::to_string(v + 2));
    r.terms = {{1, Path{q.arrow_index("d" + std::to_string(v)),
                        q.arrow_index("d" + std::to_string(v + 1))}}};
    rels.push_back(std::move(r));
  }
  return {std::move(q), std::move(rels)};
}

// ---------------------------------------------------------------------------
// Matrix representations

MatrixCategory matrix_category(std::uint32_t p, std::uint32_t d, const Budget& budget) {
  if (!is_prime_u32(p) || p >= (1u << 15))
    throw input_error("matrix category needs a small prime modulus");
  BudgetMeter meter(budget);
  MatrixCategory m;
  m.p = p;
  m.d = d;

  const std::uint32_t nob = d + 1;
  struct Mat {
    std::uint32_t rows, cols;
    std::vector<std::uint32_t> e;
  };
  std::vector<Mat> mats;
  std::vector<std::string> mids;
  std::vector<std::uint32_t> base(static_cast<std::size_t>(nob) * nob, 0);
  std::vector<std::uint32_t> cnt(static_cast<std::size_t>(nob) * nob, 0);
  for (std::uint32_t a = 0; a <= d; ++a)
    for (std::uint32_t b = 0; b <= d; ++b) {
      base[a * nob + b] = static_cast<std::uint32_t>(mats.size());
      std::vector<std::size_t> sizes(static_cast<std::size_t>(a) * b, p);
      odometer_pos(sizes, [&](const std::vector<std::size_t>& pos) {
        meter.spend(1, "matrix enumeration");
        Mat mm{b, a, std::vector<std::uint32_t>(pos.begin(), pos.end())};
        std::string id = "m" + std::to_string(b) + "x" + std::to_string(a) + "(";
        for (std::size_t i = 0; i < mm.e.size(); ++i) {
          if (i) id += ",";
          id += std::to_string(mm.e[i]);
        }
        id += ")";
        mids.push_back(std::move(id));
        mats.push_back(std::move(mm));
        meter.check_morphisms(mats.size(), "matrix enumeration");
      });
      cnt[a * nob + b] = static_cast<std::uint32_t>(mats.size()) - base[a * nob + b];
    }

  auto rank_of = [p](const std::vector<std::uint32_t>& e) {
    std::uint64_t r = 0;
    for (std::uint32_t x : e) r = r * p + x;
    return r;
  };

  AssembleInput ai;
  ai.name = "mat(p=" + std::to_string(p) + ",d=" + std::to_string(d) + ")";
  ai.prov = Provenance{"matrix-category", {{"p", std::to_string(p)}, {"d", std::to_string(d)}}};
  for (std::uint32_t o = 0; o <= d; ++o) ai.objects.push_back(std::to_string(o));
  ai.morphisms.reserve(mats.size());
  for (std::uint32_t i = 0; i < mats.size(); ++i)
    ai.morphisms.push_back({mids[i], mats[i].cols, mats[i].rows});
  ai.identity.resize(nob);
  for (std::uint32_t o = 0; o <= d; ++o) {
    std::vector<std::uint32_t> e(static_cast<std::size_t>(o) * o, 0);
    for (std::uint32_t i = 0; i < o; ++i) e[static_cast<std::size_t>(i) * o + i] = 1;
    ai.identity[o] = base[o * nob + o] + static_cast<std::uint32_t>(rank_of(e));
  }
  std::uint64_t n_comp = 0;
  for (std::uint32_t a = 0; a <= d; ++a)
    for (std::uint32_t b = 0; b <= d; ++b)
      for (std::uint32_t c = 0; c <= d; ++c) {
        const std::uint32_t fb = base[a * nob + b], gb = base[b * nob + c];
        std::vector<std::uint32_t> e(static_cast<std::size_t>(c) * a);
        for (std::uint32_t fi = 0; fi < cnt[a * nob + b]; ++fi)
          for (std::uint32_t gi = 0; gi < cnt[b * nob + c]; ++gi) {
            meter.spend(1, "matrix composition");
            ++n_comp;
            meter.check_comp(n_comp, "matrix composition");
            const Mat& f = mats[fb + fi];
            const Mat& g = mats[gb + gi];
            for (std::uint32_t i = 0; i < c; ++i)
              for (std::uint32_t j = 0; j < a; ++j) {
                std::uint64_t acc = 0;
                for (std::uint32_t t = 0; t < b; ++t)
                  acc += static_cast<std::uint64_t>(g.e[i * b + t]) * f.e[t * a + j];
                e[static_cast<std::size_t>(i) * a + j] = static_cast<std::uint32_t>(acc % p);
              }
            ai.comp.push_back(
                {gb + gi, fb + fi, base[a * nob + c] + static_cast<std::uint32_t>(rank_of(e))});
          }
      }

  m.cat = assemble_category(std::move(ai), &meter);
  m.dim.resize(nob);
  m.obj_of_dim.resize(nob);
  for (std::uint32_t o = 0; o <= d; ++o) {
    const auto ix = m.cat->object_index(std::to_string(o));
    m.dim[ix] = o;
    m.obj_of_dim[o] = ix;
  }
  m.shape.resize(mats.size());
  m.entries.resize(mats.size());
  for (std::uint32_t i = 0; i < mats.size(); ++i) {
    const auto ix = m.cat->morphism_index(mids[i]);
    m.shape[ix] = {mats[i].rows, mats[i].cols};
    m.entries[ix] = std::move(mats[i].e);
  }
  return m;
}

std::vector<std::uint32_t> evaluate_relation(const MatrixCategory& m, const Representation& rep,
                                             const Relation& r) {
  const std::uint32_t rows = rep.dims[r.tgt], cols = rep.dims[r.src];
  std::vector<std::uint32_t> acc(static_cast<std::size_t>(rows) * cols, 0);
  for (const auto& [cf, path] : r.terms) {
    std::uint32_t cur = m.cat->identity[m.obj_of_dim[rep.dims[r.src]]];
    for (std::uint32_t ar : path) cur = m.cat->compose(rep.mats[ar], cur);
    const auto& e = m.entries[cur];
    const auto p = static_cast<std::int64_t>(m.p);
    const auto c = static_cast<std::uint64_t>(((cf % p) + p) % p);
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i] = static_cast<std::uint32_t>((acc[i] + c * e[i]) % m.p);
  }
  return acc;
}

namespace {

void require_rep_inputs(const LinearCategory& a, const MatrixCategory& m) {
  if (!a.ring.modular || a.ring.p != m.p)
    throw input_error("representation categories need matching prime fields");
  for (const Relation& r : a.relations) require_relation(a.quiver, r);
}

bool relations_vanish(const LinearCategory& a, const MatrixCategory& m, const Representation& rep) {
  for (const Relation& r : a.relations) {
    for (std::uint32_t x : evaluate_relation(m, rep, r))
      if (x != 0) return false;
  }
  return true;
}

template <typename Visit>
void for_each_representation(const LinearCategory& a, const MatrixCategory& m, BudgetMeter& meter,
                             Visit&& visit) {
  const auto& arrows = a.quiver.arrows;
  std::vector<std::size_t> dsizes(a.quiver.vertices.size(), m.d + 1);
  odometer_pos(dsizes, [&](const std::vector<std::size_t>& dpos) {
    meter.spend(1, "representation enumeration");
    Representation rep;
    rep.dims.assign(dpos.begin(), dpos.end());
    std::vector<const std::vector<std::uint32_t>*> cands(arrows.size());
    std::vector<std::size_t> msizes(arrows.size());
    for (std::size_t i = 0; i < arrows.size(); ++i) {
      cands[i] = &m.cat->hom(m.obj_of_dim[rep.dims[arrows[i].src]],
                             m.obj_of_dim[rep.dims[arrows[i].tgt]]);
      msizes[i] = cands[i]->size();
    }
    rep.mats.resize(arrows.size());
    odometer_pos(msizes, [&](const std::vector<std::size_t>& mpos) {
      meter.spend(1, "representation enumeration");
      for (std::size_t i = 0; i < arrows.size(); ++i) rep.mats[i] = (*cands[i])[mpos[i]];
      if (relations_vanish(a, m, rep)) visit(rep);
    });
  });
}

}  // namespace

std::uint64_t count_representations(const LinearCategory& a, const MatrixCategory& m,
                                    const Budget& budget) {
  require_rep_inputs(a, m);
  BudgetMeter meter(budget);
  std::uint64_t n = 0;
  for_each_representation(a, m, meter, [&](const Representation&) { ++n; });
  return n;
}

RepCategoryResult rep_category_direct(const LinearCategory& a, const MatrixCategory& m,
                                      const Budget& budget) {
  require_rep_inputs(a, m);
  BudgetMeter meter(budget);
  const FinCategory& mc = *m.cat;
  const auto nv = static_cast<std::uint32_t>(a.quiver.vertices.size());
  const auto& arrows = a.quiver.arrows;

  std::vector<Representation> reps;
  std::vector<std::string> rids;
  for_each_representation(a, m, meter, [&](const Representation& rep) {
    std::vector<std::string> ds(nv), as(rep.mats.size());
    for (std::uint32_t v = 0; v < nv; ++v) ds[v] = mc.obj_id(m.obj_of_dim[rep.dims[v]]);
    for (std::size_t i = 0; i < rep.mats.size(); ++i) as[i] = mc.mor_id(rep.mats[i]);
    rids.push_back(enc_call("rep", {{"d", enc_tuple(ds)}, {"a", enc_tuple(as)}}));
    reps.push_back(rep);
    meter.check_objects(reps.size(), "representation enumeration");
  });

  const auto nrep = static_cast<std::uint32_t>(reps.size());
  if (static_cast<std::uint64_t>(nrep) * nrep > meter.limits.candidates)
    throw resource_error("candidate budget exceeded in intertwiner enumeration");
  std::vector<TupleBucket> buckets(static_cast<std::size_t>(nrep) * nrep);
  std::vector<std::vector<std::uint32_t>> comps;
  std::vector<std::array<std::uint32_t, 2>> ends;

  for (std::uint32_t ri = 0; ri < nrep; ++ri)
    for (std::uint32_t si = 0; si < nrep; ++si) {
      TupleBucket& b = buckets[static_cast<std::size_t>(ri) * nrep + si];
      b.base = static_cast<std::uint32_t>(comps.size());
      b.cands.resize(nv);
      std::vector<std::size_t> sizes(nv);
      for (std::uint32_t v = 0; v < nv; ++v) {
        b.cands[v] = &mc.hom(m.obj_of_dim[reps[ri].dims[v]], m.obj_of_dim[reps[si].dims[v]]);
        sizes[v] = b.cands[v]->size();
      }
      b.strides = suffix_strides(sizes);
      std::uint64_t next_rank = 0;
      std::vector<std::uint32_t> at(nv);
      odometer_pos(sizes, [&](const std::vector<std::size_t>& pos) {
        meter.spend(1, "intertwiner enumeration");
        const std::uint64_t rk = next_rank++;
        for (std::uint32_t v = 0; v < nv; ++v) at[v] = (*b.cands[v])[pos[v]];
        for (std::size_t i = 0; i < arrows.size(); ++i)
          if (mc.compose(at[arrows[i].tgt], reps[ri].mats[i]) !=
              mc.compose(reps[si].mats[i], at[arrows[i].src]))
            return;
        b.kept.push_back(rk);
        comps.push_back(at);
        ends.push_back({ri, si});
        meter.check_morphisms(comps.size(), "intertwiner enumeration");
      });
    }

  AssembleInput ai;
  ai.name = "rep(" + std::to_string(nv) + "v" + std::to_string(arrows.size()) + "a," + mc.name + ")";
  ai.prov = Provenance{"rep-category",
                       {{"presentation", linear_digest_hex(a)}, {"M", mc.digest_hex()}}};
  ai.objects = rids;
  std::vector<std::string> iids(comps.size());
  ai.morphisms.reserve(comps.size());
  for (std::uint32_t i = 0; i < comps.size(); ++i) {
    std::vector<std::string> at(nv);
    for (std::uint32_t v = 0; v < nv; ++v) at[v] = mc.mor_id(comps[i][v]);
    iids[i] = enc_call(
        "int", {{"src", rids[ends[i][0]]}, {"tgt", rids[ends[i][1]]}, {"at", enc_tuple(at)}});
    ai.morphisms.push_back({iids[i], ends[i][0], ends[i][1]});
  }

  ai.identity.resize(nrep);
  for (std::uint32_t ri = 0; ri < nrep; ++ri) {
    const TupleBucket& b = buckets[static_cast<std::size_t>(ri) * nrep + ri];
    std::vector<std::uint32_t> at(nv);
    for (std::uint32_t v = 0; v < nv; ++v) at[v] = mc.identity[m.obj_of_dim[reps[ri].dims[v]]];
    ai.identity[ri] = bucket_find(b, bucket_rank(b, at), "rep: identity intertwiner not enumerated");
  }

  std::uint64_t n_comp = 0;
  std::vector<std::uint32_t> at(nv);
  for (std::uint32_t ri = 0; ri < nrep; ++ri)
    for (std::uint32_t si = 0; si < nrep; ++si) {
      const TupleBucket& b1 = buckets[static_cast<std::size_t>(ri) * nrep + si];
      if (b1.kept.empty()) continue;
      for (std::uint32_t ti = 0; ti < nrep; ++ti) {
        const TupleBucket& b2 = buckets[static_cast<std::size_t>(si) * nrep + ti];
        if (b2.kept.empty()) continue;
        const TupleBucket& b3 = buckets[static_cast<std::size_t>(ri) * nrep + ti];
        const auto e1 = b1.base + static_cast<std::uint32_t>(b1.kept.size());
        const auto e2 = b2.base + static_cast<std::uint32_t>(b2.kept.size());
        for (std::uint32_t i1 = b1.base; i1 < e1; ++i1)
          for (std::uint32_t i2 = b2.base; i2 < e2; ++i2) {
            meter.spend(1, "representation composition");
            ++n_comp;
            meter.check_comp(n_comp, "representation composition");
            for (std::uint32_t v = 0; v < nv; ++v) at[v] = mc.compose(comps[i2][v], comps[i1][v]);
            ai.comp.push_back(
                {i2, i1, bucket_find(b3, bucket_rank(b3, at), "rep: composite not enumerated")});
          }
      }
    }

  RepCategoryResult out;
  out.cat = assemble_category(std::move(ai), &meter);
  out.objects.resize(nrep);
  out.components.resize(comps.size());
  for (std::uint32_t i = 0; i < nrep; ++i)
    out.objects[out.cat->object_index(rids[i])] = std::move(reps[i]);
  for (std::uint32_t i = 0; i < comps.size(); ++i)
    out.components[out.cat->morphism_index(iids[i])] = std::move(comps[i]);
  return out;
}

TupleSpec rep_category_pie_spec(const LinearCategory& a, const MatrixCategory& m) {
  require_rep_inputs(a, m);
  TupleSpec s;
  s.name = "rep-pie(" + std::to_string(a.quiver.vertices.size()) + "v" +
           std::to_string(a.quiver.arrows.size()) + "a," + m.cat->name + ")";
  s.factors.assign(a.quiver.vertices.size(), m.cat);
  for (const QuiverArrow& ar : a.quiver.arrows)
    s.slots.push_back({ar.src, ar.tgt, identity_functor(m.cat), identity_functor(m.cat)});
  for (const Relation& r : a.relations) {
    s.families.push_back({"rel:" + render_relation(a.quiver, r), [m, r](const TupleObject& t) {
                            Representation rep;
                            rep.dims.resize(t.carrier.size());
                            for (std::size_t v = 0; v < t.carrier.size(); ++v)
                              rep.dims[v] = m.dim[t.carrier[v]];
                            rep.mats = t.structure;
                            for (std::uint32_t x : evaluate_relation(m, rep, r))
                              if (x != 0) return false;
                            return true;
                          }});
  }
  s.prov = Provenance{"rep-category-via-pie",
                      {{"presentation", linear_digest_hex(a)}, {"M", m.cat->digest_hex()}}};
  return s;
}

RepCategoryPie rep_category_via_pie(const LinearCategory& a, const MatrixCategory& m,
                                    const Budget& budget) {
  RepCategoryPie out;
  out.direct = rep_category_direct(a, m, budget);
  out.pie = build_tuple_category(rep_category_pie_spec(a, m), budget);

  const FinCategory& dc = *out.direct.cat;
  std::vector<std::vector<std::uint32_t>> obj_key(dc.n_objects());
  for (std::uint32_t i = 0; i < dc.n_objects(); ++i) {
    const Representation& rep = out.direct.objects[i];
    obj_key[i].reserve(rep.dims.size() + rep.mats.size());
    for (std::uint32_t dim : rep.dims) obj_key[i].push_back(m.obj_of_dim[dim]);
    obj_key[i].insert(obj_key[i].end(), rep.mats.begin(), rep.mats.end());
  }
  out.witness = data_witness(out.direct.cat, out.pie, obj_key, out.direct.components,
                             "rep: pipeline output does not match the direct build");
  return out;
}

std::string linear_digest_hex(const LinearCategory& a) {
  Digest d;
  d.feed(a.ring.modular ? std::string("mod") : std::string("int"));
  d.feed(std::to_string(a.ring.p));
  for (const auto& v : a.quiver.vertices) d.feed(v);
  for (const auto& ar : a.quiver.arrows) {
    d.feed(ar.id);
    d.feed(a.quiver.vertices[ar.src]);
    d.feed(a.quiver.vertices[ar.tgt]);
  }
  for (const Relation& r : a.relations) {
    d.feed(std::to_string(r.src));
    d.feed(std::to_string(r.tgt));
    for (const auto& [cf, p] : r.terms) {
      d.feed(std::to_string(cf));
      for (std::uint32_t ar : p) d.feed(a.quiver.arrows[ar].id);
      d.feed(std::string("|"));
    }
    d.feed(std::string(";"));
  }
  return d.hex();
}

}  // namespace pielim
