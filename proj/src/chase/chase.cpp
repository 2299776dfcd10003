#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "detail/tuples.hpp"
#include "homkit/chase.hpp"
#include "homkit/program.hpp"

namespace homkit {

namespace {

using detail::vec_hash;

struct relation_data {
  std::size_t arity = 0;
  std::vector<std::vector<int>> tuples;
  std::unordered_set<std::vector<int>, vec_hash> members;
  std::vector<std::unordered_map<int, std::vector<int>>> index;
  std::size_t old_end = 0;
};

class store {
 public:
  explicit store(const schema& s) {
    for (const auto& [r, k] : s) {
      auto& rd = rels_[r];
      rd.arity = k;
      rd.index.resize(k);
    }
  }

  int intern(const element& e) {
    auto [it, fresh] = ids_.emplace(e, static_cast<int>(elems_.size()));
    if (fresh) elems_.push_back(e);
    return it->second;
  }
  const element& elem(int id) const { return elems_[static_cast<std::size_t>(id)]; }

  relation_data& rel(const std::string& r) { return rels_.at(r); }
  std::map<std::string, relation_data>& rels() { return rels_; }

  bool add(relation_data& rd, const std::vector<int>& t) {
    if (!rd.members.insert(t).second) return false;
    int ti = static_cast<int>(rd.tuples.size());
    for (std::size_t p = 0; p < t.size(); ++p) rd.index[p][t[p]].push_back(ti);
    rd.tuples.push_back(t);
    return true;
  }

 private:
  std::map<std::string, relation_data> rels_;
  std::unordered_map<element, int> ids_;
  std::vector<element> elems_;
};

struct catom {
  relation_data* rel;
  std::vector<int> vars;
};

struct crule {
  const rule* src;
  std::vector<std::string> var_names;
  std::vector<catom> body;
  std::vector<catom> head;
  std::vector<int> existentials;
  std::vector<int> exported;
};

crule compile_rule(const rule& r, store& st) {
  crule c;
  c.src = &r;
  std::map<std::string, int> id;
  auto var = [&](const std::string& v) {
    auto [it, fresh] = id.emplace(v, static_cast<int>(c.var_names.size()));
    if (fresh) c.var_names.push_back(v);
    return it->second;
  };
  for (const auto& a : r.body) {
    catom ca{&st.rel(a.rel), {}};
    for (const auto& v : a.args) ca.vars.push_back(var(v));
    c.body.push_back(std::move(ca));
  }
  for (const auto& v : r.exported()) c.exported.push_back(var(v));
  for (const auto& z : r.existentials) c.existentials.push_back(var(z));
  for (const auto& a : r.head) {
    catom ca{&st.rel(a.rel), {}};
    for (const auto& v : a.args) ca.vars.push_back(var(v));
    c.head.push_back(std::move(ca));
  }
  return c;
}

struct range {
  std::size_t lo, hi;
};

// Backtracking join; `assign` holds -1 for unbound variables.
class matcher {
 public:
  matcher(const std::vector<catom>& atoms, std::vector<range> ranges, std::vector<int>& assign)
      : atoms_(atoms), ranges_(std::move(ranges)), assign_(assign), done_(atoms.size(), 0) {}

  template <typename Visit>
  bool run(Visit&& visit) {
    return step(0, visit);
  }

 private:
  template <typename Visit>
  bool step(std::size_t depth, Visit& visit) {
    if (depth == atoms_.size()) return visit();
    // Most-bound atom next; ties by narrower range.
    std::size_t pick = atoms_.size();
    long best = std::numeric_limits<long>::min();
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (done_[i]) continue;
      long bound = 0;
      for (int v : atoms_[i].vars) bound += assign_[static_cast<std::size_t>(v)] >= 0;
      long width = static_cast<long>(ranges_[i].hi - ranges_[i].lo);
      long score = bound * 1000000L - std::min(width, 999999L);
      if (score > best) {
        best = score;
        pick = i;
      }
    }
    const catom& a = atoms_[pick];
    const range rg = ranges_[pick];
    if (rg.lo >= rg.hi) return true;
    done_[pick] = 1;
    const std::vector<int>* posting = nullptr;
    for (std::size_t p = 0; p < a.vars.size(); ++p) {
      int val = assign_[static_cast<std::size_t>(a.vars[p])];
      if (val < 0) continue;
      auto it = a.rel->index[p].find(val);
      if (it == a.rel->index[p].end()) {
        done_[pick] = 0;
        return true;
      }
      if (!posting || it->second.size() < posting->size()) posting = &it->second;
    }
    std::vector<int> bound_here;
    auto try_tuple = [&](std::size_t ti) -> bool {
      const auto& t = a.rel->tuples[ti];
      bound_here.clear();
      bool ok = true;
      for (std::size_t p = 0; p < t.size(); ++p) {
        int& slot = assign_[static_cast<std::size_t>(a.vars[p])];
        if (slot < 0) {
          slot = t[p];
          bound_here.push_back(a.vars[p]);
        } else if (slot != t[p]) {
          ok = false;
          break;
        }
      }
      bool cont = true;
      if (ok) cont = step(depth + 1, visit);
      for (int v : bound_here) assign_[static_cast<std::size_t>(v)] = -1;
      return cont;
    };
    bool cont = true;
    if (posting) {
      auto it = std::lower_bound(posting->begin(), posting->end(), static_cast<int>(rg.lo));
      for (; it != posting->end() && static_cast<std::size_t>(*it) < rg.hi && cont; ++it) cont = try_tuple(static_cast<std::size_t>(*it));
    } else {
      for (std::size_t ti = rg.lo; ti < rg.hi && cont; ++ti) cont = try_tuple(ti);
    }
    done_[pick] = 0;
    return cont;
  }

  const std::vector<catom>& atoms_;
  std::vector<range> ranges_;
  std::vector<int>& assign_;
  std::vector<char> done_;
};

class engine {
 public:
  engine(const program& p, const instance& input) : p_(p), st_(p.full_schema()) {
    for (const auto& e : input.domain()) domain_.push_back(st_.intern(e));
    for (const auto& f : input.facts()) {
      if (!p.in.count(f.rel)) fail(error_kind::schema, "input fact " + f.key() + " is not over the input schema");
      std::vector<int> t;
      for (const auto& e : f.args) t.push_back(st_.intern(e));
      st_.add(st_.rel(f.rel), t);
    }
    for (const auto& [r, k] : input.sch()) {
      auto it = p.in.find(r);
      if (it == p.in.end() && !p.full_schema().count(r)) continue;
      if (it != p.in.end() && it->second != k) fail(error_kind::schema, "input relation " + r + " has wrong arity");
    }
    for (const auto& r : p.rules) {
      crule c = compile_rule(r, st_);
      (r.existential() ? existential_ : datalog_).push_back(std::move(c));
    }
  }

  std::size_t saturate() {
    std::size_t derived = 0;
    bool first = !saturated_once_;
    saturated_once_ = true;
    while (true) {
      std::map<relation_data*, std::size_t> cur_end;
      for (auto& [r, rd] : st_.rels()) cur_end[&rd] = rd.tuples.size();
      std::vector<std::pair<relation_data*, std::vector<int>>> fresh;
      for (const auto& c : datalog_) {
        std::vector<int> assign(c.var_names.size(), -1);
        auto emit = [&]() {
          for (const auto& h : c.head) {
            std::vector<int> t;
            for (int v : h.vars) t.push_back(assign[static_cast<std::size_t>(v)]);
            fresh.emplace_back(h.rel, std::move(t));
          }
          return true;
        };
        if (c.body.empty()) {
          if (first) emit();
          continue;
        }
        for (std::size_t i = 0; i < c.body.size(); ++i) {
          relation_data* di = c.body[i].rel;
          if (di->old_end >= cur_end[di]) continue;
          std::vector<range> ranges;
          for (std::size_t j = 0; j < c.body.size(); ++j) {
            relation_data* rj = c.body[j].rel;
            if (j < i) ranges.push_back({0, rj->old_end});
            else if (j == i) ranges.push_back({rj->old_end, cur_end[rj]});
            else ranges.push_back({0, cur_end[rj]});
          }
          matcher m(c.body, std::move(ranges), assign);
          m.run(emit);
        }
      }
      first = false;
      for (auto& [rd, end] : cur_end) rd->old_end = end;
      std::size_t added = 0;
      for (auto& [rd, t] : fresh) added += st_.add(*rd, t);
      derived += added;
      if (added == 0) break;
    }
    return derived;
  }

  // Body matches of an existential rule sorted by element order of the
  // variables (in first-occurrence order).
  std::vector<std::vector<int>> triggers(const crule& c) {
    std::vector<std::vector<int>> out;
    std::vector<int> assign(c.var_names.size(), -1);
    std::vector<range> ranges;
    for (const auto& a : c.body) ranges.push_back({0, a.rel->tuples.size()});
    matcher m(c.body, std::move(ranges), assign);
    m.run([&]() {
      out.push_back(assign);
      return true;
    });
    std::size_t nb = 0;
    {
      std::set<int> seen;
      for (const auto& a : c.body)
        for (int v : a.vars) seen.insert(v);
      nb = seen.size();
    }
    std::sort(out.begin(), out.end(), [&](const std::vector<int>& x, const std::vector<int>& y) {
      for (std::size_t v = 0; v < nb; ++v) {
        const element& ex = st_.elem(x[v]);
        const element& ey = st_.elem(y[v]);
        if (ex != ey) return ex < ey;
      }
      return false;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool satisfied(const crule& c, std::vector<int> assign) {
    for (int z : c.existentials) assign[static_cast<std::size_t>(z)] = -1;
    std::vector<range> ranges;
    for (const auto& a : c.head) ranges.push_back({0, a.rel->tuples.size()});
    bool found = false;
    matcher m(c.head, std::move(ranges), assign);
    m.run([&]() {
      found = true;
      return false;
    });
    return found;
  }

  void fire(const crule& c, std::vector<int> assign) {
    for (int z : c.existentials) assign[static_cast<std::size_t>(z)] = st_.intern(element::null(++nulls_));
    for (const auto& h : c.head) {
      std::vector<int> t;
      for (int v : h.vars) t.push_back(assign[static_cast<std::size_t>(v)]);
      st_.add(*h.rel, t);
    }
  }

  bool any_active() {
    for (const auto& c : existential_)
      for (const auto& t : triggers(c))
        if (!satisfied(c, t)) return true;
    return false;
  }

  chase_result run(const chase_options& opts, bool strict) {
    chase_result res;
    res.steps += 0;
    saturate();
    bool budget_hit = false;
    while (!existential_.empty()) {
      if (opts.max_rounds && res.rounds >= *opts.max_rounds) break;
      bool fired = false;
      for (const auto& c : existential_) {
        for (const auto& t : triggers(c)) {
          if (satisfied(c, t)) continue;
          if (res.steps >= opts.max_steps) {
            if (strict) fail(error_kind::cap_exceeded, "chase exceeded " + std::to_string(opts.max_steps) + " existential steps");
            budget_hit = true;
            break;
          }
          fire(c, t);
          ++res.steps;
          fired = true;
        }
        if (budget_hit) break;
      }
      if (fired) ++res.rounds;
      saturate();
      if (budget_hit || !fired) break;
    }
    res.terminated = existential_.empty() || !any_active();
    build(res);
    return res;
  }

  chase_result run_datalog() {
    chase_result res;
    res.steps = saturate();
    build(res);
    return res;
  }

 private:
  void build(chase_result& res) {
    schema full = p_.full_schema();
    res.full = instance(full);
    res.output = instance(p_.out);
    for (int id : domain_) {
      res.full.add_element(st_.elem(id));
      res.output.add_element(st_.elem(id));
    }
    for (auto& [r, rd] : st_.rels()) {
      bool is_out = p_.out.count(r) != 0;
      for (const auto& t : rd.tuples) {
        fact f{r, {}};
        for (int id : t) f.args.push_back(st_.elem(id));
        res.full.add_fact(f);
        if (is_out) res.output.add_fact(f);
      }
    }
  }

  const program& p_;
  store st_;
  std::vector<int> domain_;
  std::vector<crule> datalog_;
  std::vector<crule> existential_;
  std::uint64_t nulls_ = 0;
  bool saturated_once_ = false;
};

}  // namespace

instance as_input(const program& p, const instance& i) {
  instance out(p.in);
  for (const auto& e : i.domain()) out.add_element(e);
  for (const auto& f : i.facts()) out.add_fact(f);
  if (i.pointed()) out.set_points(i.points());
  return out;
}

chase_result chase_datalog(const program& p, const instance& i) {
  if (!p.is_datalog()) fail(error_kind::precondition, "chase_datalog: program has existential rules");
  engine e(p, i);
  return e.run_datalog();
}

chase_result chase_existential(const program& p, const instance& i, const chase_options& opts) {
  bool strict = opts.mode == chase_mode::require_weakly_acyclic;
  if (strict && !is_weakly_acyclic(p)) fail(error_kind::precondition, "chase: program is not weakly acyclic");
  engine e(p, i);
  return e.run(opts, strict);
}

chase_result chase_any(const program& p, const instance& i, std::size_t depth) {
  bool datalog = std::all_of(p.rules.begin(), p.rules.end(), [](const rule& r) { return !r.existential(); });
  if (datalog) {
    engine e(p, i);
    return e.run_datalog();
  }
  if (is_weakly_acyclic(p)) return chase_existential(p, i);
  chase_options opts;
  opts.mode = chase_mode::bounded;
  opts.max_rounds = depth;
  opts.max_steps = static_cast<std::size_t>(-1);
  return chase_existential(p, i, opts);
}

}  // namespace homkit

namespace homkit {

schema pipeline::in() const {
  if (stages.empty()) fail(error_kind::precondition, "empty pipeline");
  return stages.front().in;
}

schema pipeline::out() const {
  if (stages.empty()) fail(error_kind::precondition, "empty pipeline");
  return stages.back().out;
}

pipeline_result run_pipeline(const pipeline& pl, const instance& i, std::size_t depth) {
  if (pl.stages.empty()) fail(error_kind::precondition, "empty pipeline");
  pipeline_result res;
  instance cur = i;
  for (std::size_t s = 0; s < pl.stages.size(); ++s) {
    const program& p = pl.stages[s];
    if (s > 0) {
      const auto& link = pl.links.size() >= s ? pl.links[s - 1] : std::map<std::string, std::string>{};
      instance renamed = cur.renamed(link);
      cur = instance(p.in);
      for (const auto& e : renamed.domain()) cur.add_element(e);
      for (const auto& f : renamed.facts()) {
        if (!p.in.count(f.rel)) fail(error_kind::schema, "pipeline stage " + std::to_string(s) + " does not read " + f.rel);
        cur.add_fact(f);
      }
    }
    chase_result r = chase_any(p, cur, depth);
    res.terminated = res.terminated && r.terminated;
    cur = r.output;
  }
  res.output = cur;
  return res;
}

bool satisfies(const instance& i, const tgd_set& sigma) {
  schema s = merge_schemas(i.sch(), sigma.sch);
  instance target(s);
  for (const auto& e : i.domain()) target.add_element(e);
  for (const auto& f : i.facts()) target.add_fact(f);
  for (const auto& d : sigma.deps) {
    instance body = canonical_instance(d.body, s);
    std::set<std::string> body_vars = vars_of(d.body);
    bool ok = true;
    for_each_homomorphism(body, target, {}, [&](const element_map& h) {
      hom_options opts;
      std::vector<atom> head = d.head;
      instance head_inst = canonical_instance(head, s);
      for (const auto& e : head_inst.domain()) {
        if (body_vars.count(e.key())) opts.bindings.emplace(e, h.at(e));
      }
      if (!find_homomorphism(head_inst, target, opts)) {
        ok = false;
        return false;
      }
      return true;
    });
    if (!ok) return false;
  }
  return true;
}

}  // namespace homkit
