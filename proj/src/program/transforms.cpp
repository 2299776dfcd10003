#include <algorithm>
#include <numeric>

#include "detail/rules.hpp"
#include "homkit/program.hpp"

namespace homkit {

using detail::fresh_names;

namespace {

std::size_t count_inputs(const program& p, const std::vector<atom>& atoms) {
  return static_cast<std::size_t>(
      std::count_if(atoms.begin(), atoms.end(), [&](const atom& a) { return p.in.count(a.rel) != 0; }));
}

// Groups of atom indices connected through shared variables other than `cut`.
std::vector<std::vector<std::size_t>> atom_groups(const std::vector<atom>& body, const std::string* cut) {
  std::vector<std::size_t> parent(body.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::map<std::string, std::size_t> first;
  for (std::size_t i = 0; i < body.size(); ++i)
    for (const auto& v : body[i].args) {
      if (cut && v == *cut) continue;
      auto [it, fresh] = first.emplace(v, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < body.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, g] : groups) out.push_back(std::move(g));
  std::sort(out.begin(), out.end());
  return out;
}

struct split {
  std::vector<std::size_t> part1, part2;
  std::vector<std::string> u;
};

std::optional<split> best_split(const program& p, const rule& r, const articulation_map& art) {
  std::set<std::string> head_vars = r.head_vars();
  std::optional<std::string> head_art;
  const atom& h = r.head.front();
  if (auto it = art.find(h.rel); it != art.end()) head_art = h.args[it->second - 1];

  std::optional<split> best;
  auto consider = [&](std::vector<std::size_t> part2, const std::string* z) {
    std::vector<std::size_t> part1;
    for (std::size_t i = 0; i < r.body.size(); ++i)
      if (!std::binary_search(part2.begin(), part2.end(), i)) part1.push_back(i);
    auto inputs = [&](const std::vector<std::size_t>& part) {
      return std::count_if(part.begin(), part.end(), [&](std::size_t i) { return p.in.count(r.body[i].rel) != 0; });
    };
    if (inputs(part1) == 0 || inputs(part2) == 0) return;
    std::string u0;
    if (z) {
      u0 = *z;
    } else {
      for (std::size_t i : part2)
        if (p.in.count(r.body[i].rel) && !r.body[i].args.empty()) {
          u0 = r.body[i].args.front();
          break;
        }
      if (u0.empty()) return;
    }
    std::set<std::string> vars2;
    for (std::size_t i : part2) vars2.insert(r.body[i].args.begin(), r.body[i].args.end());
    if (head_art && *head_art != u0 && vars2.count(*head_art)) return;
    split s{part1, part2, {u0}};
    for (const auto& v : vars2)
      if (v != u0 && head_vars.count(v)) s.u.push_back(v);
    if (!best || s.u.size() < best->u.size()) best = std::move(s);
  };

  std::set<std::string> body_vars = r.body_vars();
  for (const auto& z : body_vars) {
    auto groups = atom_groups(r.body, &z);
    if (groups.size() < 2) continue;
    for (const auto& g : groups) {
      bool has_z = std::any_of(g.begin(), g.end(), [&](std::size_t i) {
        return std::find(r.body[i].args.begin(), r.body[i].args.end(), z) != r.body[i].args.end();
      });
      if (!has_z) continue;
      consider(g, &z);
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < r.body.size(); ++i)
        if (!std::binary_search(g.begin(), g.end(), i)) rest.push_back(i);
      consider(rest, &z);
    }
  }
  auto comps = atom_groups(r.body, nullptr);
  if (comps.size() >= 2) {
    for (const auto& c : comps) {
      consider(c, nullptr);
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < r.body.size(); ++i)
        if (!std::binary_search(c.begin(), c.end(), i)) rest.push_back(i);
      consider(rest, nullptr);
    }
  }
  return best;
}


}  // namespace

program to_simple_tam(const program& p) {
  auto cls = classify(p);
  if (!cls.tam) fail(error_kind::precondition, "to_simple_tam: program is not TAM");
  program out = p;
  out.articulation = *cls.witness;
  out.rules.clear();
  fresh_names rels(detail::relation_names(p));
  fresh_names vars(detail::program_vars(p));

  std::function<void(const rule&)> process = [&](const rule& r) {
    std::size_t n_in = count_inputs(p, r.body);
    if (n_in == 1) {
      out.rules.push_back(r);
      return;
    }
    if (n_in >= 2) {
      auto s = best_split(p, r, out.articulation);
      if (!s) fail(error_kind::unsupported, "to_simple_tam: no admissible split for " + to_string(r));
      std::string aux = rels.next("Split");
      out.aux[aux] = s->u.size();
      out.articulation[aux] = 1;
      rule first{r.head, {}, {}};
      for (std::size_t i : s->part1) first.body.push_back(r.body[i]);
      first.body.push_back(atom{aux, s->u});
      rule second{{atom{aux, s->u}}, {}, {}};
      for (std::size_t i : s->part2) second.body.push_back(r.body[i]);
      process(first);
      process(second);
      return;
    }
    // No input atom: anchor an input atom at an articulated variable.
    std::optional<std::string> x;
    for (const auto& a : r.body) {
      auto it = out.articulation.find(a.rel);
      if (it != out.articulation.end()) {
        x = a.args[it->second - 1];
        break;
      }
    }
    if (!x) fail(error_kind::unsupported, "to_simple_tam: rule without input atom or articulated variable: " + to_string(r));
    bool any = false;
    for (const auto& [rel, k] : p.in) {
      for (std::size_t pos = 0; pos < k; ++pos) {
        atom a{rel, {}};
        for (std::size_t i = 0; i < k; ++i) a.args.push_back(i == pos ? *x : vars.next("f"));
        rule ext = r;
        ext.body.push_back(std::move(a));
        out.rules.push_back(std::move(ext));
        any = true;
      }
    }
    if (!any) fail(error_kind::unsupported, "to_simple_tam: no input relation of positive arity");
  };
  for (const auto& r : p.rules) process(r);
  out.validate();
  return out;
}

program monadic_reduction(const program& p, const std::string& r) {
  if (!p.out.count(r)) fail(error_kind::precondition, "monadic_reduction: " + r + " is not an output relation");
  auto witness = find_articulation(p);
  if (!witness) fail(error_kind::precondition, "monadic_reduction: program is not almost-monadic");
  program base = restrict_output(p, r);
  const std::size_t k = p.out.at(r);

  // Move articulation positions to the front.
  auto permute = [&](const atom& a) {
    auto it = witness->find(a.rel);
    if (it == witness->end() || it->second == 1) return a;
    atom b{a.rel, {a.args[it->second - 1]}};
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (i + 1 != it->second) b.args.push_back(a.args[i]);
    return b;
  };

  fresh_names rels(detail::relation_names(p));
  fresh_names vars(detail::program_vars(p));
  std::vector<std::string> qs;
  for (std::size_t i = 1; i <= k; ++i) qs.push_back(rels.claim("Q" + std::to_string(i)));
  std::string ans = rels.claim("Ans");

  program out;
  out.in = base.in;
  for (const auto& q : qs) out.in[q] = 1;
  out.out[ans] = 0;
  schema derived = merge_schemas(base.out, base.aux);
  std::map<std::pair<std::string, std::vector<std::size_t>>, std::string> starred;
  auto star = [&](const std::string& rel, const std::vector<std::size_t>& f) {
    auto key = std::make_pair(rel, f);
    auto it = starred.find(key);
    if (it != starred.end()) return it->second;
    std::string name = rel + "_f";
    for (std::size_t i = 0; i < f.size(); ++i) name += (i ? "_" : "") + std::to_string(f[i]);
    name = rels.claim(name);
    out.aux[name] = 1;
    starred.emplace(key, name);
    return name;
  };
  for (const auto& [rel, ar] : derived)
    if (ar == 0) out.aux[rel] = 0;

  for (const auto& orig : base.rules) {
    rule rho{{permute(orig.head.front())}, {}, {}};
    for (const auto& a : orig.body) rho.body.push_back(permute(a));
    std::vector<std::string> vs;
    {
      std::set<std::string> seen;
      auto collect = [&](const atom& a) {
        if (derived.count(a.rel))
          for (const auto& v : a.args) seen.insert(v);
      };
      collect(rho.head.front());
      for (const auto& a : rho.body) collect(a);
      vs.assign(seen.begin(), seen.end());
    }
    std::vector<std::size_t> g(vs.size(), 0);
    auto value = [&](const std::string& v) {
      return g[static_cast<std::size_t>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin())];
    };
    while (true) {
      auto translate = [&](const atom& a) {
        if (!derived.count(a.rel) || a.args.empty()) return a;
        std::vector<std::size_t> f;
        for (const auto& v : a.args) f.push_back(value(v));
        return atom{star(a.rel, f), {a.args.front()}};
      };
      const atom& h = rho.head.front();
      rule t{{translate(h)}, {}, {}};
      for (const auto& a : rho.body) t.body.push_back(translate(a));
      std::set<atom> extra;
      for (const auto& v : h.args)
        if (value(v)) extra.insert(atom{qs[value(v) - 1], {v}});
      for (const auto& a : extra)
        if (std::find(t.body.begin(), t.body.end(), a) == t.body.end()) t.body.push_back(a);
      auto made = detail::safe_extensions(t, t.head_vars(), base.in, vars);
      out.rules.insert(out.rules.end(), made.begin(), made.end());
      std::size_t pos = 0;
      while (pos < g.size() && ++g[pos] == k + 1) g[pos++] = 0;
      if (pos == g.size()) break;
    }
  }
  rule final_rule{{atom{ans, {}}}, {}, {}};
  if (k == 0) {
    final_rule.body.push_back(atom{r, {}});
  } else {
    std::vector<std::size_t> f(k);
    std::iota(f.begin(), f.end(), 1);
    final_rule.body.push_back(atom{star(r, f), {vars.next("x")}});
  }
  out.rules.push_back(final_rule);
  out.validate();
  return out;
}

program monadic_to_tam(const program& p, const std::vector<std::string>& q_names, const std::string& out_rel) {
  if (!p.is_datalog()) fail(error_kind::precondition, "monadic_to_tam: program has existential rules");
  if (p.out.size() != 1 || p.out.begin()->second != 0) fail(error_kind::precondition, "monadic_to_tam: program is not Boolean");
  for (const auto& [rel, ar] : p.aux)
    if (ar > 1) fail(error_kind::precondition, "monadic_to_tam: aux relation " + rel + " is not unary");
  std::set<std::string> qset(q_names.begin(), q_names.end());
  for (const auto& q : q_names) {
    auto it = p.in.find(q);
    if (it == p.in.end() || it->second != 1) fail(error_kind::precondition, "monadic_to_tam: " + q + " is not a unary input relation");
  }
  const std::string ans = p.out.begin()->first;
  const std::size_t k = q_names.size();

  fresh_names rels(detail::relation_names(p));
  rels.reserve(out_rel);
  fresh_names vars(detail::program_vars(p));
  program out;
  for (const auto& [rel, ar] : p.in)
    if (!qset.count(rel)) out.in[rel] = ar;
  if (detail::relation_names(p).count(out_rel) && !out.in.count(out_rel) && out_rel != ans)
    fail(error_kind::precondition, "monadic_to_tam: output name " + out_rel + " already used");
  if (out.in.count(out_rel)) fail(error_kind::precondition, "monadic_to_tam: output name " + out_rel + " is an input relation");
  out.out[out_rel] = k;
  std::map<std::string, std::string> star;
  auto declare = [&](const std::string& rel, std::size_t ar) {
    std::string name = rels.claim(rel + "_s");
    star[rel] = name;
    out.aux[name] = ar + k;
    if (ar > 0) out.articulation[name] = 1;
  };
  for (const auto& [rel, ar] : p.aux) declare(rel, ar);
  for (const auto& q : q_names) declare(q, 1);
  star[ans] = out_rel;

  std::vector<std::string> ys;
  for (std::size_t i = 0; i < k; ++i) ys.push_back(vars.next("y"));

  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::string> xs;
    for (std::size_t j = 0; j < k; ++j) xs.push_back(vars.next("x"));
    rule seed{{atom{star[q_names[i]], {}}}, {}, {}};
    seed.head.front().args.push_back(xs[i]);
    seed.head.front().args.insert(seed.head.front().args.end(), xs.begin(), xs.end());
    auto made = detail::safe_extensions(seed, seed.head_vars(), out.in, vars);
    out.rules.insert(out.rules.end(), made.begin(), made.end());
  }
  for (const auto& r : p.rules) {
    auto lift = [&](const atom& a) {
      auto it = star.find(a.rel);
      if (it == star.end()) return a;
      atom b{it->second, a.args};
      b.args.insert(b.args.end(), ys.begin(), ys.end());
      return b;
    };
    rule t{{lift(r.head.front())}, {}, {}};
    for (const auto& a : r.body) t.body.push_back(lift(a));
    auto made = detail::safe_extensions(t, t.head_vars(), out.in, vars);
    out.rules.insert(out.rules.end(), made.begin(), made.end());
  }
  out.validate();
  return out;
}

program restrict_output(const program& p, const std::string& r) {
  if (!p.out.count(r)) fail(error_kind::precondition, "restrict_output: unknown output relation " + r);
  program out = p;
  out.out = schema{{r, p.out.at(r)}};
  out.rules.clear();
  for (const auto& rl : p.rules) {
    rule t = rl;
    t.head.clear();
    for (const auto& a : rl.head)
      if (!p.out.count(a.rel) || a.rel == r) t.head.push_back(a);
    if (t.head.empty()) continue;
    // Existentials no longer used by the remaining head atoms are dropped.
    auto hv = t.head_vars();
    std::vector<std::string> ex;
    for (const auto& z : t.existentials)
      if (hv.count(z)) ex.push_back(z);
    t.existentials = ex;
    out.rules.push_back(std::move(t));
  }
  return out;
}

}  // namespace homkit
