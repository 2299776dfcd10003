#include <algorithm>

#include "homkit/adjoint.hpp"
#include "homkit/program.hpp"

namespace homkit {

namespace {

// K over D: tuples are stored as index vectors per relation.
class sl_state {
 public:
  sl_state(const program& p, const instance& j) : p_(p) {
    for (const auto& e : j.domain()) dom_.push_back(e);
    dom_.push_back(element::bottom());
    for (std::size_t i = 0; i < dom_.size(); ++i) idx_[dom_[i]] = static_cast<int>(i);
    for (const auto& f : j.facts()) {
      if (!p.out.count(f.rel)) fail(error_kind::schema, "sl_adjoint: " + f.rel + " is not an output relation");
      facts_[f.rel].insert(encode(f.args));
    }
    for (const auto* s : {&p.in, &p.aux})
      for (const auto& [rel, k] : *s) {
        auto& set = facts_[rel];
        std::vector<int> t(k, 0);
        std::size_t n = dom_.size();
        while (true) {
          set.insert(t);
          std::size_t i = k;
          while (i > 0 && ++t[i - 1] == static_cast<int>(n)) t[--i] = 0;
          if (i == 0) break;
        }
      }
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [r, s] : facts_) n += s.size();
    return n;
  }

  // One pass over all removable facts; returns whether anything was removed.
  bool sweep() {
    bool changed = false;
    for (const auto& r : p_.rules) {
      const atom& b = r.body[0];
      if (p_.out.count(b.rel)) continue;
      auto& set = facts_[b.rel];
      for (auto it = set.begin(); it != set.end();) {
        std::map<std::string, int> g;
        for (std::size_t i = 0; i < b.args.size(); ++i) g[b.args[i]] = (*it)[i];
        if (head_satisfiable(r, g)) {
          ++it;
        } else {
          it = set.erase(it);
          changed = true;
        }
      }
    }
    return changed;
  }

  instance result() const {
    instance out(p_.in);
    for (const auto& e : dom_) out.add_element(e);
    for (const auto& [rel, k] : p_.in) {
      auto it = facts_.find(rel);
      if (it == facts_.end()) continue;
      for (const auto& t : it->second) {
        fact f{rel, {}};
        for (int i : t) f.args.push_back(dom_[i]);
        out.add_fact(f);
      }
    }
    return out;
  }

 private:
  std::vector<int> encode(const std::vector<element>& args) const {
    std::vector<int> t;
    for (const auto& e : args) t.push_back(idx_.at(e));
    return t;
  }

  bool head_satisfiable(const rule& r, std::map<std::string, int>& g) const {
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
      if (k == r.existentials.size()) {
        for (const auto& h : r.head) {
          std::vector<int> t;
          for (const auto& v : h.args) t.push_back(g.at(v));
          auto it = facts_.find(h.rel);
          if (it == facts_.end() || !it->second.count(t)) return false;
        }
        return true;
      }
      for (std::size_t d = 0; d < dom_.size(); ++d) {
        g[r.existentials[k]] = static_cast<int>(d);
        if (go(k + 1)) return true;
      }
      g.erase(r.existentials[k]);
      return false;
    };
    return go(0);
  }

  const program& p_;
  std::vector<element> dom_;
  std::map<element, int> idx_;
  std::map<std::string, std::set<std::vector<int>>> facts_;
};

}  // namespace

adjoint_result sl_adjoint(const program& p, const instance& j) {
  if (!classify(p).strongly_linear) fail(error_kind::precondition, "sl_adjoint: program is not strongly linear");
  sl_state k(p, j);
  while (k.sweep()) {
  }
  adjoint_result res;
  res.source = j;
  adjoint_member m{k.result(), {}};
  for (const auto& e : j.domain()) m.iota.emplace(e, e);
  res.members.push_back(std::move(m));
  return res;
}

adjoint_result compose_adjoints(const adjoint_result& outer, const adjoint_fn& inner,
                                const std::map<std::string, std::string>& link) {
  adjoint_result res;
  res.source = outer.source;
  for (const auto& m : outer.members) {
    adjoint_result in = inner(m.j_prime.renamed(link));
    for (auto& n : in.members) {
      element_map comp;
      for (const auto& [x, y] : n.iota) {
        auto it = m.iota.find(y);
        if (it != m.iota.end()) comp.emplace(x, it->second);
      }
      res.members.push_back({std::move(n.j_prime), std::move(comp)});
    }
  }
  return res;
}

adjoint_fn adjoint_for(const program& p, adjoint_method m, const adjoint_options& opts) {
  if (m == adjoint_method::automatic) {
    auto c = classify(p);
    if (c.tam)
      m = adjoint_method::tam;
    else if (c.strongly_linear)
      m = adjoint_method::sl;
    else
      fail(error_kind::precondition, "adjoint: program is neither TAM nor strongly linear");
  }
  if (m == adjoint_method::tam) {
    if (!classify(p).tam) fail(error_kind::precondition, "adjoint: program is not TAM");
    return [p, opts](const instance& j) { return tam_adjoint(p, j, opts); };
  }
  if (!classify(p).strongly_linear) fail(error_kind::precondition, "adjoint: program is not strongly linear");
  return [p](const instance& j) { return sl_adjoint(p, j); };
}

adjoint_fn adjoint_for(const pipeline& pl, const adjoint_options& opts) {
  if (pl.stages.empty()) fail(error_kind::precondition, "adjoint: empty pipeline");
  std::vector<adjoint_fn> fns;
  for (const auto& s : pl.stages) fns.push_back(adjoint_for(s, adjoint_method::automatic, opts));
  std::vector<std::map<std::string, std::string>> back;
  for (std::size_t s = 0; s + 1 < pl.stages.size(); ++s) {
    std::map<std::string, std::string> inv;
    if (s < pl.links.size())
      for (const auto& [from, to] : pl.links[s]) inv[to] = from;
    back.push_back(std::move(inv));
  }
  return [fns, back](const instance& j) {
    adjoint_result r = fns.back()(j);
    for (std::size_t s = fns.size() - 1; s-- > 0;) r = compose_adjoints(r, fns[s], back[s]);
    return r;
  };
}

}  // namespace homkit
