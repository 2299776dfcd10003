#include <numeric>
#include <unordered_map>

#include "homkit/core.hpp"

namespace homkit {

namespace {

struct union_find {
  std::vector<std::size_t> parent;
  explicit union_find(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Forest test on the incidence multigraph with the given elements removed.
bool incidence_forest(const instance& a, const std::set<element>& removed) {
  std::unordered_map<element, std::size_t> id;
  for (const auto& e : a.domain())
    if (!removed.count(e)) id.emplace(e, id.size());
  union_find uf(id.size() + a.facts().size());
  std::size_t fi = id.size();
  for (const auto& f : a.facts()) {
    for (const auto& e : f.args) {
      auto it = id.find(e);
      if (it == id.end()) continue;
      if (!uf.unite(it->second, fi)) return false;
    }
    ++fi;
  }
  return true;
}

}  // namespace

structure structure_report(const instance& a) {
  structure s;
  s.acyclic = incidence_forest(a, {});
  std::set<element> pts(a.points().begin(), a.points().end());
  s.c_acyclic = pts.empty() ? s.acyclic : incidence_forest(a, pts);

  std::unordered_map<element, std::size_t> id;
  for (const auto& e : a.domain()) id.emplace(e, id.size());
  union_find uf(id.size());
  for (const auto& f : a.facts())
    for (std::size_t i = 1; i < f.args.size(); ++i) uf.unite(id.at(f.args[0]), id.at(f.args[i]));
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < id.size(); ++i) roots.insert(uf.find(i));
  s.connected = roots.size() <= 1;
  return s;
}

}  // namespace homkit
