#include <algorithm>

#include "homkit/program.hpp"
#include "homkit/syntax.hpp"
#include "homkit/ucq.hpp"

namespace homkit {

namespace {

void check_schema(const ucq& q, const instance& a) {
  for (const auto& [r, k] : q.sch) {
    auto it = a.sch().find(r);
    if (it != a.sch().end() && it->second != k) fail(error_kind::schema, "query and instance disagree on the arity of " + r);
  }
}

instance canonical(const cq& c, const ucq& q) { return canonical_instance(c, q.sch); }

tgd_set widen_theory(const tgd_set& sigma, const ucq& q) {
  tgd_set s = sigma;
  s.sch = merge_schemas(sigma.sch, q.sch);
  return s;
}

void check_query(const ucq& q) {
  q.validate();
  if (q.disjuncts.empty()) fail(error_kind::precondition, "query has no disjuncts");
  if (!is_c_acyclic(q)) fail(error_kind::precondition, "query is not c-acyclic");
}

void check_builtin(const ucq& q, const theory_options& opts) {
  if (opts.provider) return;
  for (const auto& a : canonical_instances(q))
    if (!structure_report(a).acyclic)
      fail(error_kind::precondition, "cyclic canonical instance needs an external dual provider");
}

// Answer on P_Sigma(a), deepening the chase until two depths agree.
bool holds_after_chase(const ucq& q, const tgd_set& sigma, const instance& a, std::size_t max_depth) {
  std::vector<element> pts = a.points();
  for (std::size_t depth = 2; depth <= max_depth; depth *= 2) {
    chase_result r1 = theory_chase(sigma, a, depth);
    bool h1 = holds(q, r1.output, pts);
    if (r1.terminated) return h1;
    chase_result r2 = theory_chase(sigma, a, 2 * depth);
    bool h2 = holds(q, r2.output, pts);
    if (h1 == h2) return h1;
  }
  fail(error_kind::cap_exceeded, "answer did not stabilise within chase depth " + std::to_string(max_depth));
}

}  // namespace

answer_set evaluate(const ucq& q, const instance& a) {
  check_schema(q, a);
  answer_set out;
  hom_options o;
  o.use_points = false;
  instance target = a;
  target.clear_points();
  for (const auto& c : q.disjuncts) {
    instance ci = canonical(c, q);
    ci.clear_points();
    for_each_homomorphism(ci, target, o, [&](const element_map& h) {
      std::vector<element> t;
      for (const auto& v : c.answer) t.push_back(h.at(element::named(v)));
      out.insert(std::move(t));
      return true;
    });
  }
  return out;
}

bool holds(const ucq& q, const instance& a, const std::vector<element>& tuple) {
  check_schema(q, a);
  if (tuple.size() != q.arity) fail(error_kind::schema, "tuple arity does not match the query");
  instance target = q.arity ? a.with_points(tuple) : a;
  if (!q.arity) target.clear_points();
  for (const auto& c : q.disjuncts) {
    instance ci = canonical(c, q);
    if (find_homomorphism(ci, target)) return true;
  }
  return false;
}

std::vector<instance> canonical_instances(const ucq& q) {
  std::vector<instance> out;
  for (const auto& c : q.disjuncts) out.push_back(canonical(c, q));
  return out;
}

bool is_c_acyclic(const ucq& q) {
  auto cs = canonical_instances(q);
  return std::all_of(cs.begin(), cs.end(), [](const instance& a) { return structure_report(a).c_acyclic; });
}

example_set characterize(const ucq& q, const tgd_set& sigma, const theory_options& opts) {
  check_query(q);
  check_builtin(q, opts);
  tgd_set s = widen_theory(sigma, q);
  duality d = dual_wrt_theory(s, canonical_instances(q), opts);
  example_set ex;
  ex.positives = d.frontier;
  ex.negatives = d.duals;
  ex.mode = example_mode::model;
  ex.theory = s;
  ex.arity = q.arity;
  return ex;
}

example_set characterize_abox(const ucq& q, const tgd_set& sigma, const theory_options& opts) {
  check_query(q);
  check_builtin(q, opts);
  tgd_set s = widen_theory(sigma, q);
  duality d = abox_dual(s, canonical_instances(q), opts);
  example_set ex;
  ex.positives = d.frontier;
  ex.negatives = d.duals;
  ex.mode = example_mode::abox;
  ex.theory = s;
  ex.arity = q.arity;
  return ex;
}

bool fits(const ucq& q, const example_set& ex, std::size_t max_depth) {
  for (const auto* xs : {&ex.positives, &ex.negatives})
    for (const auto& a : *xs)
      if (a.points().size() != q.arity) fail(error_kind::schema, "example arity does not match the query");
  auto answer = [&](const instance& a) {
    if (ex.mode == example_mode::abox && ex.theory) return holds_after_chase(q, *ex.theory, a, max_depth);
    return holds(q, a, a.points());
  };
  return std::all_of(ex.positives.begin(), ex.positives.end(), answer) &&
         std::none_of(ex.negatives.begin(), ex.negatives.end(), answer);
}

verdict verify_characterization(const ucq& q, const example_set& ex, std::size_t bound) {
  if (!fits(q, ex)) {
    verdict v;
    v.pass = false;
    v.bound = bound;
    v.explanation = "query does not fit the examples";
    for (const auto& a : ex.positives)
      if (!v.counterexample && !holds(q, a, a.points())) v.counterexample = a;
    for (const auto& a : ex.negatives)
      if (!v.counterexample && holds(q, a, a.points())) v.counterexample = a;
    return v;
  }
  duality d;
  d.frontier = ex.positives;
  d.duals = ex.negatives;
  d.theory = ex.theory;
  d.arity = ex.arity;
  d.category = ex.mode == example_mode::abox ? duality_category::abox
               : ex.theory                  ? duality_category::relative
                                            : duality_category::plain;
  if (d.category == duality_category::abox && !d.theory) d.category = duality_category::plain;
  return verify(d, bound);
}

json to_json(const example_set& ex) {
  json j;
  j["mode"] = ex.mode == example_mode::abox ? "abox" : "model";
  j["arity"] = ex.arity;
  j["positives"] = json::array();
  for (const auto& a : ex.positives) j["positives"].push_back(print_instance(a));
  j["negatives"] = json::array();
  for (const auto& a : ex.negatives) j["negatives"].push_back(print_instance(a));
  j["theory"] = ex.theory ? json(print_tgds(*ex.theory)) : json(nullptr);
  return j;
}

}  // namespace homkit
