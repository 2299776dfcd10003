#include <algorithm>
#include <atomic>

#include "homkit/duality.hpp"
#include "homkit/program.hpp"

namespace homkit {

namespace {

std::map<std::string, std::string> to_in(const schema& s) {
  std::map<std::string, std::string> m;
  for (const auto& [r, k] : s) m[r] = in_name(r);
  return m;
}

std::map<std::string, std::string> to_out(const schema& s) {
  std::map<std::string, std::string> m;
  for (const auto& [r, k] : s) m[r] = out_name(r);
  return m;
}

std::map<std::string, std::string> from_in(const schema& s) {
  std::map<std::string, std::string> m;
  for (const auto& [r, k] : s) m[in_name(r)] = r;
  return m;
}

std::map<std::string, std::string> from_out(const schema& s) {
  std::map<std::string, std::string> m;
  for (const auto& [r, k] : s) m[out_name(r)] = r;
  return m;
}

schema rename_schema(const schema& s, const std::map<std::string, std::string>& m) {
  schema out;
  for (const auto& [r, k] : s) out[m.at(r)] = k;
  return out;
}

// Copy of `a` over schema s (relations outside s must be empty).
instance over(const instance& a, const schema& s) {
  instance out(s);
  for (const auto& e : a.domain()) out.add_element(e);
  for (const auto& f : a.facts()) out.add_fact(f);
  if (a.pointed()) out.set_points(a.points());
  return out;
}

void for_each_choice(const std::vector<std::vector<element>>& options,
                     const std::function<void(const std::vector<element>&)>& visit) {
  std::vector<element> cur;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == options.size()) {
      visit(cur);
      return;
    }
    for (const auto& e : options[i]) {
      cur.push_back(e);
      go(i + 1);
      cur.pop_back();
    }
  };
  go(0);
}

void for_each_tuple(const std::vector<element>& dom, std::size_t k,
                    const std::function<void(const std::vector<element>&)>& visit) {
  for_each_choice(std::vector<std::vector<element>>(k, dom), visit);
}

// Set partitions of {0..k-1} as restricted growth strings.
void for_each_partition(std::size_t k, const std::function<void(const std::vector<std::size_t>&, std::size_t)>& visit) {
  std::vector<std::size_t> block;
  std::function<void(std::size_t)> go = [&](std::size_t blocks) {
    if (block.size() == k) {
      visit(block, blocks);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      block.push_back(b);
      go(std::max(blocks, b + 1));
      block.pop_back();
    }
  };
  go(0);
}

// Pointed variants (j', b') of every member with iota(b') = b, where b lists
// block representatives and block[i] selects the block of point i.
std::vector<instance> pointed_preimages(const adjoint_result& res, const std::vector<element>& bs,
                                        const std::vector<std::size_t>& block) {
  std::vector<instance> out;
  for (const auto& m : res.members) {
    std::vector<std::vector<element>> options(bs.size());
    for (const auto& [x, y] : m.iota)
      for (std::size_t i = 0; i < bs.size(); ++i)
        if (y == bs[i]) options[i].push_back(x);
    for_each_choice(options, [&](const std::vector<element>& t) {
      if (block.empty()) {
        out.push_back(m.j_prime);
        return;
      }
      std::vector<element> pts;
      for (auto i : block) pts.push_back(t[i]);
      out.push_back(m.j_prime.with_points(pts));
    });
  }
  return out;
}

// Points taken from the dual's own tuple, one block per distinct element.
std::vector<instance> pointed_preimages(const adjoint_result& res, const std::vector<element>& b) {
  std::vector<element> bs;
  std::vector<std::size_t> block;
  for (const auto& e : b) {
    auto it = std::find(bs.begin(), bs.end(), e);
    block.push_back(static_cast<std::size_t>(it - bs.begin()));
    if (it == bs.end()) bs.push_back(e);
  }
  return pointed_preimages(res, bs, block);
}

std::vector<instance> dedupe(std::vector<instance> xs, const dual_options& opts) {
  if (opts.minimize)
    for (auto& x : xs)
      if (x.size() <= opts.minimize_cap) x = core_of(x);
  std::vector<instance> out;
  for (auto& x : xs) {
    bool dup = std::any_of(out.begin(), out.end(), [&](const instance& y) {
      return x.size() == y.size() && x.facts().size() == y.facts().size() && isomorphic(x, y);
    });
    if (!dup) out.push_back(std::move(x));
  }
  return out;
}

std::size_t common_arity(const std::vector<instance>& f) {
  std::size_t k = f.empty() ? 0 : f[0].points().size();
  for (const auto& a : f)
    if (a.points().size() != k) fail(error_kind::precondition, "frontier members have different numbers of points");
  return k;
}

std::string fresh_relation(const schema& s, const std::string& base) {
  std::string r = base;
  for (int n = 1; s.count(r); ++n) r = base + std::to_string(n);
  return r;
}

}  // namespace

duality dual_from_program(const program& p, const std::string& r, const dual_options& opts) {
  if (!p.out.count(r)) fail(error_kind::schema, "dual_from_program: " + r + " is not an output relation");
  program q = restrict_output(p, r);
  adjoint_fn omega = adjoint_for(q, adjoint_method::automatic, opts.adjoint);
  const std::size_t k = p.out.at(r);
  duality d;
  d.generator = frontier_generator{q, r};
  d.arity = k;
  std::vector<instance> duals;
  // One target per equality pattern of the answer tuple: J_pi lacks only
  // R(b_pi(1), ..., b_pi(k)).
  for_each_partition(k, [&](const std::vector<std::size_t>& block, std::size_t blocks) {
    std::vector<element> bs;
    for (std::size_t i = 1; i <= blocks; ++i) bs.push_back(element::named(opts.b_prefix + std::to_string(i)));
    std::vector<element> b;
    for (auto i : block) b.push_back(bs[i]);
    std::vector<element> dom = bs;
    dom.push_back(element::named(opts.c_name));
    instance j(schema{{r, k}});
    for (const auto& e : dom) j.add_element(e);
    for_each_tuple(dom, k, [&](const std::vector<element>& t) {
      if (t != b) j.add_fact(fact{r, t});
    });
    for (auto& x : pointed_preimages(omega(j), bs, block)) duals.push_back(std::move(x));
  });
  d.duals = dedupe(std::move(duals), opts);
  return d;
}

program frontier_program(const std::vector<instance>& f, std::size_t k, const std::string& r) {
  program p;
  p.out[r] = k;
  for (const auto& a : f) {
    if (a.points().size() != k)
      fail(error_kind::precondition, "frontier_program: member with " + std::to_string(a.points().size()) +
                                         " points, expected " + std::to_string(k));
    if (!structure_report(a).acyclic) fail(error_kind::precondition, "frontier_program: member is not acyclic");
    if (a.facts().empty()) fail(error_kind::precondition, "frontier_program: member without facts");
    for (const auto& e : a.points())
      if (!a.active_domain().count(e)) fail(error_kind::precondition, "frontier_program: point outside the active domain");
    p.in = merge_schemas(p.in, a.sch());
    cq c = instance_to_cq(a);
    p.rules.push_back(rule{{atom{r, c.answer}}, {}, c.body});
  }
  if (p.in.count(r)) fail(error_kind::schema, "frontier_program: " + r + " clashes with an input relation");
  p.validate();
  return p;
}

dual_provider builtin_provider(const dual_options& opts) {
  return [opts](const std::vector<instance>& f, std::size_t k) {
    schema s;
    for (const auto& a : f) s = merge_schemas(s, a.sch());
    std::string r = fresh_relation(s, "Goal");
    return dual_from_program(frontier_program(f, k, r), r, opts).duals;
  };
}

chase_result theory_chase(const tgd_set& sigma, const instance& a, std::size_t depth) {
  program p = tgd_compile(sigma);
  instance in = over(a.reduct(sigma.sch), sigma.sch).renamed(to_in(sigma.sch));
  in.clear_points();
  chase_result r = chase_any(p, in, depth);
  r.output = r.output.renamed(from_out(sigma.sch));
  if (a.pointed()) r.output.set_points(a.points());
  return r;
}

namespace {

struct theory_setup {
  adjoint_fn omega;
  dual_provider provider;
  std::size_t k;
};

theory_setup setup(const tgd_set& sigma, const std::vector<instance>& f, const theory_options& opts) {
  pipeline pl = opts.rewrite ? *opts.rewrite : pipeline(tgd_compile(sigma));
  if (pl.in() != rename_schema(sigma.sch, to_in(sigma.sch)) || pl.out() != rename_schema(sigma.sch, to_out(sigma.sch)))
    fail(error_kind::schema, "theory rewrite does not match the compiled schemas");
  return {adjoint_for(pl, opts.dual.adjoint), opts.provider ? opts.provider : builtin_provider(opts.dual),
          common_arity(f)};
}

}  // namespace

duality dual_wrt_theory(const tgd_set& sigma, const std::vector<instance>& f_spec, const theory_options& opts) {
  if (!is_weakly_acyclic(tgd_compile(sigma)))
    fail(error_kind::precondition, "dual_wrt_theory: compiled theory is not weakly acyclic");
  auto st = setup(sigma, f_spec, opts);
  duality d;
  d.theory = sigma;
  d.category = duality_category::relative;
  d.arity = st.k;
  for (const auto& a : f_spec) d.frontier.push_back(theory_chase(sigma, a).output);
  std::vector<instance> duals;
  for (const auto& bb : st.provider(f_spec, st.k)) {
    instance target = over(bb.reduct(sigma.sch), sigma.sch).renamed(to_out(sigma.sch));
    target.clear_points();
    for (const auto& bp : pointed_preimages(st.omega(target), bb.points())) {
      instance src = bp.renamed(from_in(sigma.sch));
      duals.push_back(theory_chase(sigma, src).output);
    }
  }
  d.duals = dedupe(std::move(duals), opts.dual);
  return d;
}

duality abox_dual(const tgd_set& sigma, const std::vector<instance>& f, const theory_options& opts) {
  auto st = setup(sigma, f, opts);
  duality d;
  d.theory = sigma;
  d.category = duality_category::abox;
  d.arity = st.k;
  d.frontier = f;
  std::vector<instance> duals;
  for (const auto& bb : st.provider(f, st.k)) {
    instance target = over(bb.reduct(sigma.sch), sigma.sch).renamed(to_out(sigma.sch));
    target.clear_points();
    for (const auto& bp : pointed_preimages(st.omega(target), bb.points())) duals.push_back(bp.renamed(from_in(sigma.sch)));
  }
  d.duals = dedupe(std::move(duals), opts.dual);
  return d;
}

tri abox_morphism(const tgd_set& sigma, const instance& a, const instance& b, const element_map& h, std::size_t depth) {
  for (const auto& [x, y] : h)
    if (!a.domain().count(x) || !b.domain().count(y)) fail(error_kind::precondition, "abox_morphism: map leaves the domains");
  instance ua = a, ub = b;
  ua.clear_points();
  ub.clear_points();
  hom_options o;
  o.bindings = h;
  o.use_points = false;
  auto maps = [&](const instance& x, const instance& y) { return find_homomorphism(x, y, o).has_value(); };
  if (is_weakly_acyclic(tgd_compile(sigma)))
    return maps(theory_chase(sigma, ua).output, theory_chase(sigma, ub).output) ? tri::yes : tri::no;
  chase_result tgt = theory_chase(sigma, ub, 4 * depth);
  chase_result src = theory_chase(sigma, ua, depth);
  if (!maps(src.output, tgt.output)) return tgt.terminated ? tri::no : tri::unknown;
  if (src.terminated) return tri::yes;
  chase_result src2 = theory_chase(sigma, ua, 2 * depth);
  if (maps(src2.output, tgt.output)) return tri::yes;
  return tgt.terminated ? tri::no : tri::unknown;
}

instance core_of(const instance& a) {
  instance cur = a;
  std::set<element> pts(a.points().begin(), a.points().end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : cur.domain()) {
      if (pts.count(e)) continue;
      instance sub(cur.sch());
      for (const auto& x : cur.domain())
        if (x != e) sub.add_element(x);
      for (const auto& f : cur.facts())
        if (std::find(f.args.begin(), f.args.end(), e) == f.args.end()) sub.add_fact(f);
      if (cur.pointed()) sub.set_points(cur.points());
      if (sub.domain().empty() && !cur.domain().empty()) continue;
      if (find_homomorphism(cur, sub)) {
        cur = std::move(sub);
        changed = true;
        break;
      }
    }
  }
  return cur;
}

verdict verify(duality& d, std::size_t bound) {
  verdict v;
  if (d.category != duality_category::abox) {
    duality_spec s;
    s.frontier = d.frontier;
    s.generator = d.generator;
    s.duals = d.duals;
    s.theory = d.theory ? &*d.theory : nullptr;
    s.arity = d.arity;
    v = verify_duality(s, bound);
  } else {
    const tgd_set& sigma = *d.theory;
    std::atomic<bool> unknown{false};
    auto arrow = [&](const instance& x, const std::vector<element>& from, const instance& y,
                     const std::vector<element>& to) {
      element_map h;
      for (std::size_t i = 0; i < from.size(); ++i) {
        auto [it, fresh] = h.emplace(from[i], to[i]);
        if (!fresh && it->second != to[i]) return tri::no;
      }
      return abox_morphism(sigma, x, y, h);
    };
    v = search_counterexample(sigma.sch, bound, [&](const instance& c) -> std::optional<std::pair<instance, std::string>> {
      std::optional<std::pair<instance, std::string>> bad;
      std::vector<element> dom(c.domain().begin(), c.domain().end());
      for_each_tuple(dom, d.arity, [&](const std::vector<element>& t) {
        if (bad) return;
        bool up = false, down = false;
        for (const auto& a : d.frontier) {
          tri r = arrow(a, a.points(), c, t);
          if (r == tri::unknown) unknown = true;
          if (r == tri::yes) {
            up = true;
            break;
          }
        }
        for (const auto& b : d.duals) {
          tri r = arrow(c, t, b, b.points());
          if (r == tri::unknown) unknown = true;
          if (r == tri::yes) {
            down = true;
            break;
          }
        }
        instance cc = d.arity ? c.with_points(t) : c;
        if (up && down) bad.emplace(cc, "ABox is above the frontier and below a dual");
        if (!up && !down) bad.emplace(cc, "ABox is neither above the frontier nor below a dual");
      });
      return bad;
    });
    if (unknown) {
      v.unknown = true;
      if (v.pass) v.explanation = "bounded chase left some arrows undecided";
    }
  }
  d.verified = v.pass && !v.unknown;
  return v;
}

}  // namespace homkit
