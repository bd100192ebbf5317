#pragma once

// Shared internals for the enumeration-heavy modules: odometer scans over
// index tuples, candidate-rank bucketing for composite lookup, byte-packed
// keys, and data-located witness functors into engine-built categories.

#include <algorithm>
#include <cstring>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pielim/engine.hpp"

namespace pielim {
namespace detail {

// Runs body(pos) for every index tuple; the last position advances fastest,
// so ranks computed with suffix strides match enumeration order. No
// positions -> exactly one empty tuple; any empty axis -> nothing.
template <typename Body>
void odometer_pos(const std::vector<std::size_t>& sizes, Body&& body) {
  for (std::size_t s : sizes)
    if (s == 0) return;
  std::vector<std::size_t> pos(sizes.size(), 0);
  for (;;) {
    body(pos);
    std::size_t i = pos.size();
    for (;;) {
      if (i == 0) return;
      --i;
      if (++pos[i] < sizes[i]) break;
      pos[i] = 0;
    }
  }
}

inline std::vector<std::uint64_t> suffix_strides(const std::vector<std::size_t>& sizes) {
  std::vector<std::uint64_t> st(sizes.size(), 1);
  for (std::size_t i = sizes.size(); i-- > 1;) st[i - 1] = st[i] * sizes[i];
  return st;
}

// Survivors of one hom-set product, bucketed by the (source, target) pair of
// the ambient enumeration. Composites and identities are resolved through
// candidate ranks instead of id strings.
struct TupleBucket {
  std::vector<const std::vector<std::uint32_t>*> cands;  // ascending index lists
  std::vector<std::uint64_t> strides;
  std::vector<std::uint64_t> kept;  // ranks of survivors, ascending
  std::uint32_t base = 0;           // global index of the first survivor
};

inline std::uint64_t bucket_rank(const TupleBucket& b, const std::vector<std::uint32_t>& values) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& cc = *b.cands[i];
    auto it = std::lower_bound(cc.begin(), cc.end(), values[i]);
    if (it == cc.end() || *it != values[i])
      throw std::logic_error("tuple component outside its candidate hom-set");
    r += static_cast<std::uint64_t>(it - cc.begin()) * b.strides[i];
  }
  return r;
}

inline std::uint32_t bucket_find(const TupleBucket& b, std::uint64_t rank, const char* what) {
  auto it = std::lower_bound(b.kept.begin(), b.kept.end(), rank);
  if (it == b.kept.end() || *it != rank) throw std::logic_error(what);
  return b.base + static_cast<std::uint32_t>(it - b.kept.begin());
}

inline std::string pack_u32s(std::initializer_list<const std::vector<std::uint32_t>*> parts) {
  std::size_t n = 0;
  for (const auto* p : parts) n += p->size();
  std::string key(n * 4, '\0');
  std::size_t off = 0;
  for (const auto* p : parts) {
    if (!p->empty()) std::memcpy(key.data() + off, p->data(), p->size() * 4);
    off += p->size() * 4;
  }
  return key;
}

inline std::string pack_ends(std::uint32_t s, std::uint32_t t, const std::vector<std::uint32_t>& f) {
  std::string key(8 + f.size() * 4, '\0');
  std::memcpy(key.data(), &s, 4);
  std::memcpy(key.data() + 4, &t, 4);
  if (!f.empty()) std::memcpy(key.data() + 8, f.data(), f.size() * 4);
  return key;
}

// Functor into an engine-built category located purely through carrier and
// structure data, so it is independent of either side's id scheme.
inline FinFunctor data_witness(const CatPtr& from, const TupleResult& pie,
                               const std::vector<std::vector<std::uint32_t>>& obj_key,
                               const std::vector<std::vector<std::uint32_t>>& mor_key,
                               const char* what) {
  const FinCategory& dc = *from;
  const FinCategory& pc = *pie.cat;
  std::unordered_map<std::string, std::uint32_t> olut, mlut;
  olut.reserve(pc.n_objects());
  mlut.reserve(pc.n_morphisms());
  for (std::uint32_t j = 0; j < pc.n_objects(); ++j)
    olut.emplace(pack_u32s({&pie.objects[j].carrier, &pie.objects[j].structure}), j);
  for (std::uint32_t j = 0; j < pc.n_morphisms(); ++j)
    mlut.emplace(pack_ends(pc.src(j), pc.tgt(j), pie.mor_carrier[j]), j);

  FinFunctor w;
  w.source = from;
  w.target = pie.cat;
  w.omap.resize(dc.n_objects());
  w.mmap.resize(dc.n_morphisms());
  for (std::uint32_t i = 0; i < dc.n_objects(); ++i) {
    auto it = olut.find(pack_u32s({&obj_key[i]}));
    if (it == olut.end()) throw std::logic_error(what);
    w.omap[i] = it->second;
  }
  for (std::uint32_t i = 0; i < dc.n_morphisms(); ++i) {
    auto it = mlut.find(pack_ends(w.omap[dc.src(i)], w.omap[dc.tgt(i)], mor_key[i]));
    if (it == mlut.end()) throw std::logic_error(what);
    w.mmap[i] = it->second;
  }
  if (!validate_functor(w).ok || !functor_is_iso(w)) throw std::logic_error(what);
  return w;
}

template <typename Visit>
void for_each_functor(const CatPtr& cp, const CatPtr& kp, BudgetMeter& meter, Visit&& visit) {
  const FinCategory& c = *cp;
  const FinCategory& k = *kp;
  std::vector<std::uint32_t> nonid;
  for (std::uint32_t m = 0; m < c.n_morphisms(); ++m)
    if (!c.is_identity(m)) nonid.push_back(m);

  std::vector<std::size_t> osizes(c.n_objects(), k.n_objects());
  odometer_pos(osizes, [&](const std::vector<std::size_t>& opos) {
    meter.spend(1, "functor enumeration");
    std::vector<std::uint32_t> omap(opos.begin(), opos.end());
    std::vector<const std::vector<std::uint32_t>*> cands(nonid.size());
    std::vector<std::size_t> msizes(nonid.size());
    for (std::size_t j = 0; j < nonid.size(); ++j) {
      cands[j] = &k.hom(omap[c.src(nonid[j])], omap[c.tgt(nonid[j])]);
      msizes[j] = cands[j]->size();
    }
    std::vector<std::uint32_t> mmap(c.n_morphisms());
    for (std::uint32_t o = 0; o < c.n_objects(); ++o) mmap[c.identity[o]] = k.identity[omap[o]];
    odometer_pos(msizes, [&](const std::vector<std::size_t>& mpos) {
      meter.spend(1, "functor enumeration");
      for (std::size_t j = 0; j < nonid.size(); ++j) mmap[nonid[j]] = (*cands[j])[mpos[j]];
      for (const auto& [key, gf] : c.comp) {
        auto g = static_cast<std::uint32_t>(key >> 32);
        auto f = static_cast<std::uint32_t>(key & 0xffffffffu);
        if (k.compose(mmap[g], mmap[f]) != mmap[gf]) return;
      }
      visit(omap, mmap);
    });
  });
}

}  // namespace detail
}  // namespace pielim
