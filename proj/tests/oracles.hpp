#pragma once

// Brute-force oracles used by tests and the acceptance suite. Everything in
// here is deliberately written independently of the library's algorithms:
// partitions by naive sweeping instead of union-find, explicit element
// chasing, exhaustive scans.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pielim/fincat.hpp"
#include "pielim/setdiag.hpp"

namespace oracles {

// partition of all tagged elements "obj.elem" by sweeping the identification
// relation to a fixed point
inline std::vector<std::set<std::string>> colimit_partition(const pielim::SetDiagram& d) {
  const pielim::FinCategory& c = *d.shape;
  std::vector<std::string> tags;
  std::map<std::string, std::size_t> ix;
  for (std::uint32_t o = 0; o < c.n_objects(); ++o)
    for (const auto& e : d.elems[o]) {
      ix[c.obj_id(o) + "." + e] = tags.size();
      tags.push_back(c.obj_id(o) + "." + e);
    }
  std::vector<std::size_t> cls(tags.size());
  for (std::size_t i = 0; i < cls.size(); ++i) cls[i] = i;

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t m = 0; m < c.n_morphisms(); ++m) {
      std::uint32_t s = c.src(m), t = c.tgt(m);
      for (std::uint32_t i = 0; i < d.maps[m].size(); ++i) {
        std::size_t a = ix.at(c.obj_id(s) + "." + d.elems[s][i]);
        std::size_t b = ix.at(c.obj_id(t) + "." + d.elems[t][d.maps[m][i]]);
        std::size_t lo = std::min(cls[a], cls[b]);
        if (cls[a] != lo || cls[b] != lo) {
          std::size_t ca = cls[a], cb = cls[b];
          for (auto& x : cls)
            if (x == ca || x == cb) x = lo;
          changed = true;
        }
      }
    }
  }
  std::map<std::size_t, std::set<std::string>> groups;
  for (std::size_t i = 0; i < tags.size(); ++i) groups[cls[i]].insert(tags[i]);
  std::vector<std::set<std::string>> out;
  for (auto& [k, v] : groups) out.push_back(std::move(v));
  return out;
}

// restriction of a Set diagram along a functor into its shape
inline pielim::SetDiagram restrict_diagram(const pielim::SetDiagram& d,
                                           const pielim::FinFunctor& delta) {
  pielim::SetDiagram r;
  r.shape = delta.source;
  r.elems.resize(delta.source->n_objects());
  r.maps.resize(delta.source->n_morphisms());
  for (std::uint32_t v = 0; v < delta.source->n_objects(); ++v)
    r.elems[v] = d.elems[delta.omap[v]];
  for (std::uint32_t a = 0; a < delta.source->n_morphisms(); ++a)
    r.maps[a] = d.maps[delta.mmap[a]];
  return r;
}

// The canonical comparison colim(D . delta) -> colim(D): send the class of a
// tagged element (v, e) to the class of (delta v, e). True when bijective.
// Uses the partition oracle on both sides, not the library colimit.
inline bool comparison_is_bijective(const pielim::SetDiagram& d,
                                    const pielim::FinFunctor& delta) {
  auto restricted = restrict_diagram(d, delta);
  auto part_r = colimit_partition(restricted);
  auto part_d = colimit_partition(d);

  const pielim::FinCategory& s = *delta.source;
  const pielim::FinCategory& t = *delta.target;

  // class index of a tag in a partition
  auto find_class = [](const std::vector<std::set<std::string>>& part,
                       const std::string& tag) -> int {
    for (std::size_t i = 0; i < part.size(); ++i)
      if (part[i].count(tag)) return static_cast<int>(i);
    return -1;
  };

  std::vector<int> image(part_r.size(), -1);
  for (std::size_t i = 0; i < part_r.size(); ++i) {
    // map via any representative
    const std::string& tag = *part_r[i].begin();
    auto dot = tag.find('.');
    std::string vobj = tag.substr(0, dot), elem = tag.substr(dot + 1);
    std::uint32_t v = s.object_index(vobj);
    std::string target_tag = t.obj_id(delta.omap[v]) + "." + elem;
    image[i] = find_class(part_d, target_tag);
    if (image[i] < 0) return false;
    // well-definedness across all members
    for (const auto& member : part_r[i]) {
      auto mdot = member.find('.');
      std::uint32_t mv = s.object_index(member.substr(0, mdot));
      std::string mtag = t.obj_id(delta.omap[mv]) + "." + member.substr(mdot + 1);
      if (find_class(part_d, mtag) != image[i]) return false;
    }
  }
  if (part_r.size() != part_d.size()) return false;
  std::vector<int> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) return false;
  return true;
}

}  // namespace oracles
