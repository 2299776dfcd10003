#include <algorithm>
#include <cctype>

#include "homkit/model.hpp"

namespace homkit {

std::set<std::string> vars_of(const std::vector<atom>& atoms) {
  std::set<std::string> out;
  for (const auto& a : atoms) out.insert(a.args.begin(), a.args.end());
  return out;
}

schema schema_of(const std::vector<atom>& atoms) {
  schema s;
  for (const auto& a : atoms) s = merge_schemas(s, schema{{a.rel, a.args.size()}});
  return s;
}

std::set<std::string> rule::body_vars() const { return vars_of(body); }
std::set<std::string> rule::head_vars() const { return vars_of(head); }

std::vector<std::string> rule::exported() const {
  auto b = body_vars();
  std::vector<std::string> out;
  for (const auto& v : head_vars())
    if (b.count(v)) out.push_back(v);
  return out;
}

schema program::full_schema() const { return merge_schemas(merge_schemas(in, out), aux); }

bool program::is_datalog() const {
  return std::all_of(rules.begin(), rules.end(), [](const rule& r) { return !r.existential() && r.head.size() == 1; });
}

namespace {

void check_arity(const schema& s, const atom& a, const char* where) {
  auto it = s.find(a.rel);
  if (it == s.end()) fail(error_kind::schema, std::string("relation ") + a.rel + " not allowed in " + where);
  if (it->second != a.args.size())
    fail(error_kind::schema, "atom " + to_string(a) + " has wrong arity for " + a.rel + "/" + std::to_string(it->second));
}

}  // namespace

void program::validate() const {
  for (const auto& [r, k] : in)
    if (out.count(r) || aux.count(r)) fail(error_kind::schema, "relation " + r + " in more than one schema");
  for (const auto& [r, k] : out)
    if (aux.count(r)) fail(error_kind::schema, "relation " + r + " in more than one schema");
  for (const auto& [r, p] : articulation) {
    auto it = aux.find(r);
    if (it == aux.end()) fail(error_kind::schema, "articulation declared for non-aux relation " + r);
    if (p < 1 || p > it->second) fail(error_kind::schema, "articulation position out of range for " + r);
  }
  schema heads = merge_schemas(out, aux);
  schema bodies = merge_schemas(in, aux);
  for (const auto& r : rules) {
    if (r.head.empty()) fail(error_kind::parse, "rule without head atom");
    for (const auto& a : r.head) {
      if (in.count(a.rel)) fail(error_kind::schema, "head relation " + a.rel + " is an input relation");
      check_arity(heads, a, "rule heads");
    }
    for (const auto& a : r.body) check_arity(bodies, a, "rule bodies");
    auto bv = r.body_vars();
    std::set<std::string> ex(r.existentials.begin(), r.existentials.end());
    if (ex.size() != r.existentials.size()) fail(error_kind::parse, "repeated existential variable in " + to_string(r));
    for (const auto& z : ex)
      if (bv.count(z)) fail(error_kind::parse, "existential variable " + z + " occurs in body of " + to_string(r));
    for (const auto& v : r.head_vars())
      if (!bv.count(v) && !ex.count(v)) fail(error_kind::parse, "unsafe rule (head variable " + v + "): " + to_string(r));
  }
}

void tgd_set::validate() const {
  for (const auto& t : deps) {
    for (const auto& a : t.body) check_arity(sch, a, "TGD bodies");
    for (const auto& a : t.head) check_arity(sch, a, "TGD heads");
    auto bv = vars_of(t.body);
    std::set<std::string> ex(t.existentials.begin(), t.existentials.end());
    for (const auto& z : ex)
      if (bv.count(z)) fail(error_kind::parse, "existential variable " + z + " occurs in TGD body");
    for (const auto& v : vars_of(t.head))
      if (!bv.count(v) && !ex.count(v)) fail(error_kind::parse, "unsafe TGD (head variable " + v + "): " + to_string(t));
  }
}

void ucq::validate() const {
  for (const auto& d : disjuncts) {
    if (d.answer.size() != arity) fail(error_kind::schema, "disjunct answer tuple has wrong arity in query " + name);
    auto vs = vars_of(d.body);
    for (const auto& x : d.answer)
      if (!vs.count(x)) fail(error_kind::precondition, "answer variable " + x + " occurs in no conjunct of query " + name);
    for (const auto& a : d.body) check_arity(sch, a, "query bodies");
  }
}

instance canonical_instance(const std::vector<atom>& atoms, const schema& s, const std::vector<std::string>& points) {
  instance out(s);
  for (const auto& a : atoms) {
    fact f{a.rel, {}};
    for (const auto& v : a.args) f.args.push_back(element::named(v));
    out.add_fact(f);
  }
  std::vector<element> pts;
  for (const auto& v : points) pts.push_back(element::named(v));
  out.set_points(std::move(pts));
  return out;
}

instance canonical_instance(const rule& r, const schema& s) {
  if (r.head.size() != 1) fail(error_kind::precondition, "canonical instance needs a single-head rule");
  return canonical_instance(r.body, s, r.head.front().args);
}

instance canonical_instance(const cq& q, const schema& s) { return canonical_instance(q.body, s, q.answer); }

cq instance_to_cq(const instance& a) {
  std::map<element, std::string> var;
  std::set<std::string> taken;
  for (const auto& e : a.domain()) {
    if (e.kind() == element_kind::named && !e.name().empty() && e.name()[0] != '_') taken.insert(e.name());
  }
  std::size_t next = 0;
  for (const auto& e : a.domain()) {
    if (e.kind() == element_kind::named && taken.count(e.name())) {
      var.emplace(e, e.name());
      continue;
    }
    std::string v;
    do v = "v" + std::to_string(++next);
    while (taken.count(v));
    taken.insert(v);
    var.emplace(e, v);
  }
  cq q;
  for (const auto& f : a.facts()) {
    atom at{f.rel, {}};
    for (const auto& e : f.args) at.args.push_back(var.at(e));
    q.body.push_back(std::move(at));
  }
  for (const auto& p : a.points()) q.answer.push_back(var.at(p));
  return q;
}

std::string to_string(const atom& a) {
  std::string s = a.rel + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    s += a.args[i];
  }
  return s + ")";
}

namespace {

std::string join_atoms(const std::vector<atom>& atoms) {
  std::string s;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) s += ", ";
    s += to_string(atoms[i]);
  }
  return s;
}

std::string join_vars(const std::vector<std::string>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += ",";
    s += vs[i];
  }
  return s;
}

}  // namespace

std::string to_string(const rule& r) {
  std::string s;
  if (r.existential()) s += "exists " + join_vars(r.existentials) + " : ";
  s += join_atoms(r.head) + " :-";
  if (!r.body.empty()) s += " " + join_atoms(r.body);
  return s + ".";
}

std::string to_string(const tgd& t) {
  std::string s = join_atoms(t.body) + " -> ";
  if (!t.existentials.empty()) s += "exists " + join_vars(t.existentials) + " : ";
  return s + join_atoms(t.head) + ".";
}

std::string to_string(const cq& q) {
  std::string s = "(" + join_vars(q.answer) + ") :-";
  if (!q.body.empty()) s += " " + join_atoms(q.body);
  return s + ".";
}

}  // namespace homkit
