#include <algorithm>
#include <cmath>
#include <numeric>

#include "../detail/rules.hpp"
#include "homkit/adjoint.hpp"
#include "homkit/program.hpp"

namespace homkit {

namespace {

using detail::fresh_names;

// Variable components of a rule body (0-ary atoms are ignored).
std::vector<std::vector<std::string>> body_components(const rule& r) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& v) -> std::string {
    auto& p = parent[v];
    if (p.empty() || p == v) return p = v;
    return p = find(p);
  };
  for (const auto& a : r.body)
    for (const auto& v : a.args) {
      find(v);
      parent[find(v)] = find(a.args[0]);
    }
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& a : r.body)
    for (const auto& v : a.args) {
      auto& g = groups[find(v)];
      if (std::find(g.begin(), g.end(), v) == g.end()) g.push_back(v);
    }
  std::vector<std::vector<std::string>> out;
  for (auto& [root, vs] : groups) out.push_back(std::move(vs));
  return out;
}

// Adds a fresh binary input relation joining the body components of every
// disconnected rule in a star. Representatives are variables that may repeat:
// input-atom variables or articulated variables.
program connect_components(const program& p, const articulation_map& art, const std::string& conn) {
  program q = p;
  q.in[conn] = 2;
  q.articulation = art;
  for (auto& r : q.rules) {
    auto comps = body_components(r);
    if (comps.size() <= 1) continue;
    std::set<std::string> ok;
    for (const auto& a : r.body) {
      if (p.in.count(a.rel)) ok.insert(a.args.begin(), a.args.end());
      auto it = art.find(a.rel);
      if (it != art.end()) ok.insert(a.args[it->second - 1]);
    }
    std::vector<std::string> reps;
    for (const auto& c : comps) {
      auto it = std::find_if(c.begin(), c.end(), [&](const std::string& v) { return ok.count(v) != 0; });
      if (it == c.end()) fail(error_kind::unsupported, "tam_adjoint: cannot connect body of " + to_string(r));
      reps.push_back(*it);
    }
    for (std::size_t i = 1; i < reps.size(); ++i) r.body.push_back(atom{conn, {reps[0], reps[i]}});
  }
  return q;
}

struct aux_atom {
  int rel;
  std::vector<int> args;
  std::vector<std::size_t> positions;  // input-atom positions holding the articulated variable
};

struct compiled_rule {
  std::vector<int> y;
  std::vector<aux_atom> body;
  bool head_aux = false;
  int head_rel = 0;               // aux id when head_aux
  std::string head_out;           // output relation otherwise
  std::vector<int> head_args;
  std::vector<std::size_t> head_positions;
  int nvars = 0;
};

// Builds the (b, X) construction for a connected simple TAM program.
class tam_builder {
 public:
  tam_builder(const program& q, const articulation_map& art, const instance& j, std::size_t cap)
      : q_(q), art_(art), j_(j), cap_(cap) {
    for (const auto& e : j.domain()) dom_.push_back(e);
    dom_.push_back(element::bottom());
    for (const auto& [r, k] : q.aux) {
      aux_id_[r] = static_cast<int>(aux_names_.size());
      aux_names_.push_back(r);
    }
    compile_rules();
    build_fact_universe();
  }

  instance build() {
    instance out(q_.in);
    for (std::size_t b = 0; b < dom_.size(); ++b) out.add_element(make_element(b, 0));
    for (const auto& [rel, n] : q_.in) build_relation(rel, n, out);
    return out;
  }

  element_map iota(const instance& jp) const {
    element_map m;
    for (const auto& e : jp.domain())
      if (e.kind() == element_kind::pair && e.first().kind() != element_kind::bottom) m.emplace(e, e.first());
    return m;
  }

 private:
  using enc_fact = std::vector<int>;  // aux id, then domain indices

  void compile_rules() {
    for (const auto& r : q_.rules)
      for (const auto& a : r.body) body_uses_.insert(a.rel);
    for (const auto& r : q_.rules) {
      const atom* input = nullptr;
      for (const auto& a : r.body)
        if (q_.in.count(a.rel)) input = &a;
      if (!input) fail(error_kind::unsupported, "tam_adjoint: rule without input atom: " + to_string(r));
      std::map<std::string, int> var;
      auto vid = [&](const std::string& v) {
        auto [it, fresh] = var.emplace(v, static_cast<int>(var.size()));
        return it->second;
      };
      auto positions_of = [&](const std::string& v) {
        std::vector<std::size_t> ps;
        for (std::size_t i = 0; i < input->args.size(); ++i)
          if (input->args[i] == v) ps.push_back(i);
        return ps;
      };
      auto art_var = [&](const atom& a) -> std::string {
        auto it = art_.find(a.rel);
        if (it == art_.end() || a.args.empty())
          fail(error_kind::unsupported, "tam_adjoint: aux relation " + a.rel + " has no articulation position");
        return a.args[it->second - 1];
      };
      compiled_rule base;
      for (const auto& v : input->args) base.y.push_back(vid(v));
      for (const auto& a : r.body) {
        if (&a == input) continue;
        aux_atom c{aux_id_.at(a.rel), {}, positions_of(art_var(a))};
        if (c.positions.empty())
          fail(error_kind::unsupported, "tam_adjoint: articulated variable outside the input atom in " + to_string(r));
        for (const auto& v : a.args) c.args.push_back(vid(v));
        base.body.push_back(std::move(c));
      }
      for (const auto& h : r.head) {
        compiled_rule cr = base;
        if (q_.aux.count(h.rel)) {
          if (!body_uses_.count(h.rel)) continue;  // never read back
          cr.head_aux = true;
          cr.head_rel = aux_id_.at(h.rel);
          cr.head_positions = positions_of(art_var(h));
          if (cr.head_positions.empty())
            fail(error_kind::unsupported, "tam_adjoint: head articulated variable outside the input atom in " + to_string(r));
        } else {
          cr.head_out = h.rel;
        }
        for (const auto& v : h.args) cr.head_args.push_back(vid(v));
        cr.nvars = static_cast<int>(var.size());
        rules_[input->rel].push_back(std::move(cr));
      }
    }
  }

  // All aux facts over D, grouped by the element in articulation position.
  void build_fact_universe() {
    universe_.assign(dom_.size(), {});
    std::size_t n = dom_.size();
    for (const auto& [rel, k] : q_.aux) {
      auto it = art_.find(rel);
      if (it == art_.end() || k == 0) continue;
      std::size_t pos = it->second - 1;
      std::vector<int> args(k, 0);
      std::size_t total = 1;
      for (std::size_t i = 0; i < k; ++i) total *= n;
      for (std::size_t c = 0; c < total; ++c) {
        std::size_t x = c;
        for (std::size_t i = k; i-- > 0;) {
          args[i] = static_cast<int>(x % n);
          x /= n;
        }
        enc_fact f{aux_id_.at(rel)};
        f.insert(f.end(), args.begin(), args.end());
        universe_[args[pos]].push_back(f);
      }
    }
    index_.assign(dom_.size(), {});
    for (std::size_t b = 0; b < dom_.size(); ++b) {
      std::sort(universe_[b].begin(), universe_[b].end());
      if (universe_[b].size() > 24)
        fail(error_kind::cap_exceeded, "tam_adjoint: too many aux facts per element (" +
                                           std::to_string(universe_[b].size()) + ")");
      for (std::size_t i = 0; i < universe_[b].size(); ++i) index_[b][universe_[b][i]] = static_cast<int>(i);
    }
  }

  element make_element(std::size_t b, std::uint32_t mask) {
    auto key = std::make_pair(b, mask);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<fact> xs;
    for (std::size_t i = 0; i < universe_[b].size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      const auto& f = universe_[b][i];
      fact g{aux_names_[f[0]], {}};
      for (std::size_t k = 1; k < f.size(); ++k) g.args.push_back(dom_[f[k]]);
      xs.push_back(std::move(g));
    }
    element e = element::pair(dom_[b], std::move(xs));
    cache_.emplace(key, e);
    return e;
  }

  struct slot {
    std::size_t b;
    std::uint32_t mask;
  };

  bool in_slot(const slot& s, const enc_fact& f) const {
    auto it = index_[s.b].find(f);
    return it != index_[s.b].end() && (s.mask >> it->second & 1u);
  }

  // Conditions 2 and 3 for one rule; g(y) is pinned to the slot elements.
  bool rule_holds(const compiled_rule& r, const std::vector<slot>& t) const {
    std::vector<int> g(r.nvars, -1);
    for (std::size_t i = 0; i < r.y.size(); ++i) {
      int& v = g[r.y[i]];
      if (v >= 0 && v != static_cast<int>(t[i].b)) return true;  // no such g
      v = static_cast<int>(t[i].b);
    }
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
      if (k == r.body.size()) return head_holds(r, t, g);
      const aux_atom& a = r.body[k];
      const slot& s = t[a.positions[0]];
      for (std::size_t i = 0; i < universe_[s.b].size(); ++i) {
        if (!(s.mask >> i & 1u)) continue;
        const auto& f = universe_[s.b][i];
        if (f[0] != a.rel) continue;
        std::vector<int> bound;
        bool ok = true;
        for (std::size_t m = 0; m < a.args.size() && ok; ++m) {
          int& v = g[a.args[m]];
          if (v < 0) {
            v = f[m + 1];
            bound.push_back(a.args[m]);
          } else if (v != f[m + 1]) {
            ok = false;
          }
        }
        for (std::size_t p = 1; p < a.positions.size() && ok; ++p) ok = in_slot(t[a.positions[p]], f);
        if (ok && !go(k + 1)) return false;
        for (int v : bound) g[v] = -1;
      }
      return true;
    };
    return go(0);
  }

  bool head_holds(const compiled_rule& r, const std::vector<slot>& t, const std::vector<int>& g) const {
    if (r.head_aux) {
      enc_fact f{r.head_rel};
      for (int v : r.head_args) f.push_back(g[v]);
      return std::all_of(r.head_positions.begin(), r.head_positions.end(),
                         [&](std::size_t p) { return in_slot(t[p], f); });
    }
    fact f{r.head_out, {}};
    for (int v : r.head_args) f.args.push_back(dom_[g[v]]);
    return j_.contains(f);
  }

  void build_relation(const std::string& rel, std::size_t n, instance& out) {
    std::vector<slot> choices;
    for (std::size_t b = 0; b < dom_.size(); ++b)
      for (std::uint32_t m = 0; m < (1u << universe_[b].size()); ++m) choices.push_back({b, m});
    double total = std::pow(static_cast<double>(choices.size()), static_cast<double>(n));
    if (total > static_cast<double>(cap_))
      fail(error_kind::cap_exceeded, "tam_adjoint: " + std::to_string(static_cast<unsigned long long>(total)) +
                                         " candidate " + rel + " facts exceed cap " + std::to_string(cap_));
    static const std::vector<compiled_rule> none;
    auto rit = rules_.find(rel);
    const auto& rules = rit == rules_.end() ? none : rit->second;
    std::vector<std::size_t> idx(n, 0);
    std::vector<slot> t(n);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) t[i] = choices[idx[i]];
      bool ok = std::all_of(rules.begin(), rules.end(), [&](const compiled_rule& r) { return rule_holds(r, t); });
      if (ok) {
        fact f{rel, {}};
        for (const auto& s : t) f.args.push_back(make_element(s.b, s.mask));
        out.add_fact(f);
      }
      std::size_t i = n;
      while (i > 0 && ++idx[i - 1] == choices.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }

  const program& q_;
  const articulation_map& art_;
  const instance& j_;
  std::size_t cap_;
  std::vector<element> dom_;
  std::map<std::string, int> aux_id_;
  std::vector<std::string> aux_names_;
  std::set<std::string> body_uses_;
  std::map<std::string, std::vector<compiled_rule>> rules_;
  std::vector<std::vector<enc_fact>> universe_;
  std::vector<std::map<enc_fact, int>> index_;
  std::map<std::pair<std::size_t, std::uint32_t>, element> cache_;
};

// Maximal sets of elements pairwise joined by `conn` in both directions, loops
// included (Bron-Kerbosch with pivoting).
std::vector<std::vector<element>> connector_cliques(const instance& jp, const std::string& conn) {
  std::vector<element> verts;
  for (const auto& e : jp.domain())
    if (jp.contains(fact{conn, {e, e}})) verts.push_back(e);
  std::size_t n = verts.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      adj[a][b] = a != b && jp.contains(fact{conn, {verts[a], verts[b]}}) && jp.contains(fact{conn, {verts[b], verts[a]}});
  std::vector<std::vector<element>> out;
  std::function<void(std::vector<std::size_t>&, std::vector<std::size_t>, std::vector<std::size_t>)> bk =
      [&](std::vector<std::size_t>& r, std::vector<std::size_t> p, std::vector<std::size_t> x) {
        if (p.empty() && x.empty()) {
          std::vector<element> c;
          for (auto v : r) c.push_back(verts[v]);
          out.push_back(std::move(c));
          return;
        }
        std::size_t pivot = p.empty() ? x[0] : p[0];
        std::vector<std::size_t> cand;
        for (auto v : p)
          if (!adj[pivot][v]) cand.push_back(v);
        for (auto v : cand) {
          std::vector<std::size_t> np, nx;
          for (auto w : p)
            if (adj[v][w]) np.push_back(w);
          for (auto w : x)
            if (adj[v][w]) nx.push_back(w);
          r.push_back(v);
          bk(r, np, nx);
          r.pop_back();
          p.erase(std::find(p.begin(), p.end(), v));
          x.push_back(v);
        }
      };
  std::vector<std::size_t> r, p(n);
  std::iota(p.begin(), p.end(), 0);
  bk(r, p, {});
  std::sort(out.begin(), out.end());
  return out;
}

void prune_dominated(std::vector<adjoint_member>& ms) {
  std::vector<bool> gone(ms.size(), false);
  hom_options o;
  o.use_points = false;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t k = 0; k < ms.size(); ++k) {
      if (k == i || gone[k]) continue;
      if (find_homomorphism(ms[i].j_prime, ms[k].j_prime, o)) {
        gone[i] = true;
        break;
      }
    }
  std::vector<adjoint_member> kept;
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (!gone[i]) kept.push_back(std::move(ms[i]));
  ms = std::move(kept);
}

instance over_schema(const instance& j, const schema& s, const char* who) {
  instance out(s);
  for (const auto& e : j.domain()) out.add_element(e);
  for (const auto& f : j.facts()) {
    if (!s.count(f.rel)) fail(error_kind::schema, std::string(who) + ": " + f.rel + " is not an output relation");
    out.add_fact(f);
  }
  return out;
}

}  // namespace

adjoint_result tam_adjoint(const program& p, const instance& j_in, const adjoint_options& opts) {
  auto cls = classify(p);
  if (!cls.tam) fail(error_kind::precondition, "tam_adjoint: program is not TAM");
  instance j = over_schema(j_in, p.out, "tam_adjoint");
  adjoint_result res;
  res.source = j_in;

  program q = p;
  std::string conn;
  if (!cls.connected) {
    fresh_names rels(detail::relation_names(p));
    conn = rels.claim("Conn");
    q = connect_components(p, *cls.witness, conn);
  }
  q = to_simple_tam(q);
  auto qc = classify(q);
  if (!qc.simple || !qc.connected)
    fail(error_kind::unsupported, "tam_adjoint: normal form is not a connected simple program");
  articulation_map art = q.articulation;

  tam_builder builder(q, art, j, opts.cap);
  instance jp = builder.build();
  element_map iota = builder.iota(jp);

  if (conn.empty()) {
    res.members.push_back({jp.reduct(p.in), iota});
    return res;
  }
  for (const auto& clique : connector_cliques(jp, conn)) {
    std::set<element> keep(clique.begin(), clique.end());
    instance m(p.in);
    for (const auto& e : clique) m.add_element(e);
    for (const auto& f : jp.facts()) {
      if (!p.in.count(f.rel)) continue;
      if (std::all_of(f.args.begin(), f.args.end(), [&](const element& e) { return keep.count(e) != 0; }))
        m.add_fact(f);
    }
    element_map mi;
    for (const auto& e : clique) {
      auto it = iota.find(e);
      if (it != iota.end()) mi.emplace(e, it->second);
    }
    res.members.push_back({std::move(m), std::move(mi)});
  }
  if (opts.prune_dominated) prune_dominated(res.members);
  return res;
}

}  // namespace homkit
