#include <algorithm>
#include <deque>

#include "homkit/program.hpp"

namespace homkit {

namespace {

instance body_instance(const rule& r, const schema& s) { return canonical_instance(r.body, s); }

// Articulation conditions for one rule; `f` holds 0 for "undefined".
bool rule_articulated(const rule& r, const program& p, const std::map<std::string, std::size_t>& f) {
  std::map<std::string, int> count;
  for (const auto& a : r.body)
    for (const auto& v : a.args) ++count[v];
  std::set<std::string> head_art;
  for (const auto& a : r.head) {
    if (!p.aux.count(a.rel)) continue;
    std::size_t pos = f.at(a.rel);
    if (pos) head_art.insert(a.args[pos - 1]);
  }
  for (const auto& a : r.body) {
    if (!p.aux.count(a.rel)) continue;
    std::size_t pos = f.at(a.rel);
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i + 1 == pos) continue;
      const auto& v = a.args[i];
      if (count[v] != 1 || head_art.count(v)) return false;
    }
  }
  return true;
}

}  // namespace

bool is_tree_shaped(const program& p) {
  schema s = p.full_schema();
  return std::all_of(p.rules.begin(), p.rules.end(),
                     [&](const rule& r) { return structure_report(body_instance(r, s)).acyclic; });
}

std::optional<articulation_map> find_articulation(const program& p) {
  if (!p.is_datalog()) return std::nullopt;
  std::vector<std::string> rels;
  for (const auto& [r, k] : p.aux) rels.push_back(r);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < rels.size(); ++i) index[rels[i]] = i;
  // Rules become checkable once their last aux relation is assigned.
  std::vector<std::vector<const rule*>> ready(rels.size() + 1);
  for (const auto& r : p.rules) {
    std::size_t last = 0;
    bool any = false;
    for (const auto* atoms : {&r.head, &r.body})
      for (const auto& a : *atoms) {
        auto it = index.find(a.rel);
        if (it == index.end()) continue;
        last = any ? std::max(last, it->second) : it->second;
        any = true;
      }
    ready[any ? last : rels.size()].push_back(&r);
  }
  std::map<std::string, std::size_t> f;
  for (const rule* r : ready[rels.size()])
    if (!rule_articulated(*r, p, f)) return std::nullopt;
  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i == rels.size()) return true;
    const auto& rel = rels[i];
    std::vector<std::size_t> cands;
    auto declared = p.articulation.find(rel);
    if (declared != p.articulation.end()) {
      cands.push_back(declared->second);
    } else {
      for (std::size_t pos = 1; pos <= p.aux.at(rel); ++pos) cands.push_back(pos);
      cands.push_back(0);
    }
    for (std::size_t c : cands) {
      f[rel] = c;
      bool ok = true;
      for (const rule* r : ready[i])
        if (!rule_articulated(*r, p, f)) {
          ok = false;
          break;
        }
      if (ok && search(i + 1)) return true;
    }
    f.erase(rel);
    return false;
  };
  if (!search(0)) return std::nullopt;
  articulation_map out;
  for (const auto& [r, pos] : f)
    if (pos) out[r] = pos;
  return out;
}

bool is_weakly_acyclic(const program& p) {
  using node = std::pair<std::string, std::size_t>;
  std::map<node, std::set<node>> edges;
  std::vector<std::pair<node, node>> special;
  for (const auto& r : p.rules) {
    std::set<std::string> ex(r.existentials.begin(), r.existentials.end());
    for (const auto& b : r.body) {
      if (!p.aux.count(b.rel)) continue;
      for (std::size_t i = 0; i < b.args.size(); ++i) {
        node from{b.rel, i};
        for (const auto& h : r.head) {
          if (!p.aux.count(h.rel)) continue;
          for (std::size_t j = 0; j < h.args.size(); ++j) {
            node to{h.rel, j};
            if (h.args[j] == b.args[i]) edges[from].insert(to);
            if (ex.count(h.args[j])) {
              edges[from].insert(to);
              special.emplace_back(from, to);
            }
          }
        }
      }
    }
  }
  for (const auto& [from, to] : special) {
    std::set<node> seen{to};
    std::deque<node> queue{to};
    while (!queue.empty()) {
      node n = queue.front();
      queue.pop_front();
      if (n == from) return false;
      auto it = edges.find(n);
      if (it == edges.end()) continue;
      for (const auto& m : it->second)
        if (seen.insert(m).second) queue.push_back(m);
    }
  }
  return true;
}

classification classify(const program& p) {
  classification c;
  schema s = p.full_schema();
  c.tree_shaped = is_tree_shaped(p);
  c.witness = find_articulation(p);
  c.almost_monadic = c.witness.has_value();
  c.tam = c.tree_shaped && c.almost_monadic;
  c.simple = std::all_of(p.rules.begin(), p.rules.end(), [&](const rule& r) {
    return std::count_if(r.body.begin(), r.body.end(), [&](const atom& a) { return p.in.count(a.rel) != 0; }) == 1;
  });
  c.connected = std::all_of(p.rules.begin(), p.rules.end(),
                            [&](const rule& r) { return structure_report(body_instance(r, s)).connected; });
  c.monadic = p.is_datalog() &&
              std::all_of(p.aux.begin(), p.aux.end(), [](const auto& kv) { return kv.second <= 1; });
  c.strongly_linear = std::all_of(p.rules.begin(), p.rules.end(), [](const rule& r) {
    if (r.body.size() != 1) return false;
    std::set<std::string> vs(r.body[0].args.begin(), r.body[0].args.end());
    return vs.size() == r.body[0].args.size();
  });
  c.weakly_acyclic = is_weakly_acyclic(p);
  c.non_recursive = p.aux.empty();
  c.boolean_program = p.out.size() == 1 && p.out.begin()->second == 0;
  return c;
}

json to_json(const classification& c) {
  json j;
  j["tree_shaped"] = c.tree_shaped;
  j["almost_monadic"] = c.almost_monadic;
  j["tam"] = c.tam;
  j["simple"] = c.simple;
  j["connected"] = c.connected;
  j["monadic"] = c.monadic;
  j["strongly_linear"] = c.strongly_linear;
  j["weakly_acyclic"] = c.weakly_acyclic;
  j["non_recursive"] = c.non_recursive;
  j["boolean"] = c.boolean_program;
  if (c.witness) {
    j["articulation"] = json::object();
    for (const auto& [r, pos] : *c.witness) j["articulation"][r] = pos;
  } else {
    j["articulation"] = nullptr;
  }
  return j;
}

}  // namespace homkit
