#include "pielim/corpus.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace pielim {

CatPtr terminal_category() {
  FinCategoryBuilder b("terminal");
  b.object("*").morphism("id", "*", "*").identity("*", "id").compose_rule("id", "id", "id");
  return b.build();
}

CatPtr discrete_category(int n) {
  FinCategoryBuilder b("discrete" + std::to_string(n));
  for (int i = 0; i < n; ++i) {
    std::string o = "d" + std::to_string(i);
    std::string m = "id" + std::to_string(i);
    b.object(o).morphism(m, o, o).identity(o, m).compose_rule(m, m, m);
  }
  return b.build();
}

// poset category on named elements: one morphism per related pair
static CatPtr poset_category(const std::string& name, const std::vector<std::string>& elems,
                             const std::function<bool(std::size_t, std::size_t)>& le) {
  FinCategoryBuilder b(name);
  auto mid = [&](std::size_t i, std::size_t j) {
    return i == j ? "id" + elems[i] : "le(" + elems[i] + "," + elems[j] + ")";
  };
  for (std::size_t i = 0; i < elems.size(); ++i) {
    b.object(elems[i]);
    b.identity(elems[i], mid(i, i));
  }
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j)
      if (le(i, j)) b.morphism(mid(i, j), elems[i], elems[j]);
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = 0; j < elems.size(); ++j)
      for (std::size_t k = 0; k < elems.size(); ++k)
        if (le(i, j) && le(j, k)) b.compose_rule(mid(j, k), mid(i, j), mid(i, k));
  return b.build();
}

CatPtr arrow_category() {
  std::vector<std::string> e = {"0", "1"};
  return poset_category("arrow", e, [](std::size_t i, std::size_t j) { return i <= j; });
}

CatPtr parallel_pair_category() {
  FinCategoryBuilder b("parallel_pair");
  b.object("a").object("b");
  b.morphism("ida", "a", "a").morphism("idb", "b", "b");
  b.morphism("f", "a", "b").morphism("g", "a", "b");
  b.identity("a", "ida").identity("b", "idb");
  b.compose_rule("ida", "ida", "ida").compose_rule("idb", "idb", "idb");
  b.compose_rule("f", "ida", "f").compose_rule("idb", "f", "f");
  b.compose_rule("g", "ida", "g").compose_rule("idb", "g", "g");
  return b.build();
}

CatPtr walking_iso_category() {
  FinCategoryBuilder b("walking_iso");
  b.object("a").object("b");
  b.morphism("ida", "a", "a").morphism("idb", "b", "b");
  b.morphism("u", "a", "b").morphism("v", "b", "a");
  b.identity("a", "ida").identity("b", "idb");
  b.compose_rule("ida", "ida", "ida").compose_rule("idb", "idb", "idb");
  b.compose_rule("u", "ida", "u").compose_rule("idb", "u", "u");
  b.compose_rule("v", "idb", "v").compose_rule("ida", "v", "v");
  b.compose_rule("v", "u", "ida").compose_rule("u", "v", "idb");
  return b.build();
}

CatPtr chain_poset(int n) {
  std::vector<std::string> e;
  for (int i = 0; i < n; ++i) e.push_back(std::to_string(i));
  return poset_category("chain" + std::to_string(n), e,
                        [](std::size_t i, std::size_t j) { return i <= j; });
}

CatPtr grid_poset_2x2() {
  std::vector<std::string> e = {"00", "01", "10", "11"};
  auto le = [&](std::size_t i, std::size_t j) {
    return (e[i][0] <= e[j][0]) && (e[i][1] <= e[j][1]);
  };
  return poset_category("grid22", e, le);
}

CatPtr finset_skeleton(int maxn) {
  FinCategoryBuilder b("finset" + std::to_string(maxn));

  // function src -> tgt as image digits; empty image list when src = 0
  auto fid = [](int s, int t, const std::vector<int>& im) {
    std::string id = "f" + std::to_string(s) + std::to_string(t);
    if (s > 0) {
      id += "_";
      for (int v : im) id += static_cast<char>('0' + v);
    }
    return id;
  };

  struct Fn {
    int s, t;
    std::vector<int> im;
  };
  std::vector<Fn> fns;
  for (int s = 0; s <= maxn; ++s) {
    for (int t = 0; t <= maxn; ++t) {
      if (s > 0 && t == 0) continue;  // no maps from nonempty to empty
      std::vector<int> im(static_cast<std::size_t>(s), 0);
      bool done = false;
      while (!done) {
        fns.push_back({s, t, im});
        int p = s;
        done = (s == 0);
        while (p > 0) {
          --p;
          if (++im[static_cast<std::size_t>(p)] < t) break;
          im[static_cast<std::size_t>(p)] = 0;
          if (p == 0) done = true;
        }
      }
    }
  }

  for (int n = 0; n <= maxn; ++n) {
    std::string o = std::to_string(n);
    b.object(o);
    std::vector<int> im;
    for (int i = 0; i < n; ++i) im.push_back(i);
    b.identity(o, fid(n, n, im));
  }
  for (const auto& f : fns) b.morphism(fid(f.s, f.t, f.im), std::to_string(f.s),
                                       std::to_string(f.t));
  for (const auto& f : fns) {
    for (const auto& g : fns) {
      if (g.s != f.t) continue;
      std::vector<int> im(static_cast<std::size_t>(f.s));
      for (int i = 0; i < f.s; ++i)
        im[static_cast<std::size_t>(i)] = g.im[static_cast<std::size_t>(
            f.im[static_cast<std::size_t>(i)])];
      b.compose_rule(fid(g.s, g.t, g.im), fid(f.s, f.t, f.im), fid(f.s, g.t, im));
    }
  }
  return b.build();
}

std::vector<std::pair<std::string, CatPtr>> standard_corpus() {
  return {
      {"terminal", terminal_category()},
      {"arrow", arrow_category()},
      {"discrete2", discrete_category(2)},
      {"discrete3", discrete_category(3)},
      {"parallel_pair", parallel_pair_category()},
      {"walking_iso", walking_iso_category()},
      {"chain3", chain_poset(3)},
      {"grid22", grid_poset_2x2()},
      {"sets2", finset_skeleton(2)},
  };
}

}  // namespace pielim
