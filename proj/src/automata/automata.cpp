#include <algorithm>
#include <functional>
#include <sstream>

#include "detail/lexer.hpp"
#include "detail/rules.hpp"
#include "homkit/automata.hpp"

namespace homkit {

namespace {

void collect_schema(const tree_term& t, schema& s) {
  if (t.is_leaf()) {
    for (const auto& x : t.labels) s.emplace(x, 1);
    return;
  }
  auto [it, fresh] = s.emplace(t.rel, t.children.size());
  if (!fresh && it->second != t.children.size()) fail(error_kind::schema, "relation " + t.rel + " used with two arities");
  for (const auto& c : t.children) collect_schema(c, s);
}

element build_tree(const tree_term& t, instance& out, std::size_t& counter) {
  if (t.is_leaf()) {
    element v = element::named("v" + std::to_string(++counter));
    out.add_element(v);
    for (const auto& x : t.labels) out.add_fact(x, {v});
    return v;
  }
  if (t.index < 1 || t.index > t.children.size()) fail(error_kind::precondition, "tree-term index out of range");
  std::vector<element> roots;
  for (const auto& c : t.children) roots.push_back(build_tree(c, out, counter));
  out.add_fact(t.rel, roots);
  return roots[t.index - 1];
}

// Cartesian product over per-position candidate sets.
template <typename T, typename Visit>
void for_each_product(const std::vector<std::vector<T>>& sets, Visit visit) {
  std::vector<T> cur(sets.size());
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == sets.size()) {
      visit(cur);
      return;
    }
    for (const auto& x : sets[i]) {
      cur[i] = x;
      go(i + 1);
    }
  };
  go(0);
}

std::vector<std::set<std::string>> label_subsets(const std::set<std::string>& labels) {
  std::vector<std::string> xs(labels.begin(), labels.end());
  if (xs.size() > 16) fail(error_kind::cap_exceeded, "more than 16 labels");
  std::vector<std::set<std::string>> out;
  for (std::size_t m = 0; m < (std::size_t{1} << xs.size()); ++m) {
    std::set<std::string> s;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (m >> i & 1) s.insert(xs[i]);
    out.push_back(s);
  }
  return out;
}

void check_signature(const tree_automaton& a, const tree_automaton& b) {
  if (a.sch != b.sch || a.labels != b.labels) fail(error_kind::schema, "automata have different signatures");
}

}  // namespace

std::size_t tree_term::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

std::string to_string(const tree_term& t) {
  std::ostringstream os;
  if (t.is_leaf()) {
    os << "leaf{";
    bool first = true;
    for (const auto& x : t.labels) {
      os << (first ? "" : ",") << x;
      first = false;
    }
    os << "}";
    return os.str();
  }
  os << "down_" << t.index << "^" << t.rel << "(";
  for (std::size_t i = 0; i < t.children.size(); ++i) os << (i ? ", " : "") << to_string(t.children[i]);
  os << ")";
  return os.str();
}

instance term_to_tree(const tree_term& t, const schema& s) {
  schema full = s;
  collect_schema(t, full);
  instance out(full);
  std::size_t counter = 0;
  element root = build_tree(t, out, counter);
  out.set_points({root});
  return out;
}

tree_term tree_to_term(const instance& a, const std::set<std::string>& labels) {
  if (a.points().size() != 1) fail(error_kind::precondition, "tree_to_term needs exactly one point");
  structure st = structure_report(a);
  if (!st.connected || !st.acyclic) fail(error_kind::precondition, "tree_to_term needs a connected acyclic instance");
  std::map<element, std::vector<const fact*>> incident;
  for (const auto& f : a.facts()) {
    if (f.args.empty()) fail(error_kind::precondition, "0-ary fact " + f.rel + " has no tree-term");
    if (labels.count(f.rel)) {
      if (f.args.size() != 1) fail(error_kind::schema, "label " + f.rel + " is not unary");
      continue;
    }
    for (const auto& e : f.args) incident[e].push_back(&f);
  }
  std::set<const fact*> used;
  std::set<element> seen;
  std::function<tree_term(const element&)> build = [&](const element& x) -> tree_term {
    seen.insert(x);
    for (const fact* f : incident[x]) {
      if (used.count(f)) continue;
      used.insert(f);
      std::size_t i = std::find(f->args.begin(), f->args.end(), x) - f->args.begin();
      std::vector<tree_term> kids;
      for (const auto& e : f->args) kids.push_back(build(e));
      return tree_term::down(f->rel, i + 1, std::move(kids));
    }
    std::set<std::string> s;
    for (const auto& l : labels)
      if (a.contains(fact{l, {x}})) s.insert(l);
    return tree_term::leaf(std::move(s));
  };
  tree_term t = build(a.points()[0]);
  if (seen.size() != a.size()) fail(error_kind::precondition, "tree_to_term: unreachable elements");
  return t;
}

schema tree_automaton::full_schema() const {
  schema s = sch;
  for (const auto& x : labels) s.emplace(x, 1);
  return s;
}

void tree_automaton::validate() const {
  for (const auto& x : labels)
    if (sch.count(x)) fail(error_kind::schema, "label " + x + " clashes with a relation");
  for (const auto& q : accept)
    if (!states.count(q)) fail(error_kind::schema, "accepting state " + q + " is not a state");
  for (const auto& [s, qs] : leaf) {
    for (const auto& x : s)
      if (!labels.count(x)) fail(error_kind::schema, "unknown label " + x);
    for (const auto& q : qs)
      if (!states.count(q)) fail(error_kind::schema, "unknown state " + q);
  }
  for (const auto& [o, ts] : trans) {
    auto it = sch.find(o.first);
    if (it == sch.end()) fail(error_kind::schema, "unknown relation " + o.first);
    if (o.second < 1 || o.second > it->second) fail(error_kind::schema, "index out of range for " + o.first);
    for (const auto& [from, to] : ts) {
      if (from.size() != it->second) fail(error_kind::schema, "transition arity mismatch for " + o.first);
      for (const auto& q : from)
        if (!states.count(q)) fail(error_kind::schema, "unknown state " + q);
      if (!states.count(to)) fail(error_kind::schema, "unknown state " + to);
    }
  }
}

std::set<std::string> run_states(const tree_automaton& a, const tree_term& t) {
  if (t.is_leaf()) {
    for (const auto& x : t.labels)
      if (!a.labels.count(x)) fail(error_kind::schema, "term uses unknown label " + x);
    auto it = a.leaf.find(t.labels);
    return it == a.leaf.end() ? std::set<std::string>{} : it->second;
  }
  auto r = a.sch.find(t.rel);
  if (r == a.sch.end() || r->second != t.children.size()) fail(error_kind::schema, "term uses unknown relation " + t.rel);
  if (t.index < 1 || t.index > t.children.size()) fail(error_kind::precondition, "tree-term index out of range");
  std::vector<std::set<std::string>> kids;
  for (const auto& c : t.children) kids.push_back(run_states(a, c));
  std::set<std::string> out;
  auto it = a.trans.find({t.rel, t.index});
  if (it == a.trans.end()) return out;
  for (const auto& [from, to] : it->second) {
    bool ok = true;
    for (std::size_t j = 0; j < from.size() && ok; ++j) ok = kids[j].count(from[j]) != 0;
    if (ok) out.insert(to);
  }
  return out;
}

bool run(const tree_automaton& a, const tree_term& t) {
  auto qs = run_states(a, t);
  return std::any_of(qs.begin(), qs.end(), [&](const std::string& q) { return a.accept.count(q) != 0; });
}

tree_automaton automaton_union(const tree_automaton& a, const tree_automaton& b) {
  check_signature(a, b);
  bool clash = std::any_of(a.states.begin(), a.states.end(), [&](const std::string& q) { return b.states.count(q) != 0; });
  auto tag = [&](const std::string& p, const std::string& q) { return clash ? p + q : q; };
  tree_automaton out;
  out.sch = a.sch;
  out.labels = a.labels;
  for (const auto& [src, p] : std::vector<std::pair<const tree_automaton*, std::string>>{{&a, "l_"}, {&b, "r_"}}) {
    for (const auto& q : src->states) out.states.insert(tag(p, q));
    for (const auto& q : src->accept) out.accept.insert(tag(p, q));
    for (const auto& [s, qs] : src->leaf)
      for (const auto& q : qs) out.leaf[s].insert(tag(p, q));
    for (const auto& [o, ts] : src->trans)
      for (const auto& [from, to] : ts) {
        std::vector<std::string> f;
        for (const auto& q : from) f.push_back(tag(p, q));
        out.trans[o].insert({f, tag(p, to)});
      }
  }
  return out;
}

tree_automaton complement(const tree_automaton& a, std::size_t cap) {
  using subset = std::set<std::string>;
  std::map<subset, std::string> name;
  std::vector<subset> order;
  auto intern = [&](const subset& s) {
    auto it = name.find(s);
    if (it != name.end()) return it->second;
    if (name.size() >= cap) fail(error_kind::cap_exceeded, "complement exceeds " + std::to_string(cap) + " states");
    std::string n = "s" + std::to_string(name.size());
    name.emplace(s, n);
    order.push_back(s);
    return n;
  };
  tree_automaton out;
  out.sch = a.sch;
  out.labels = a.labels;
  for (const auto& s : label_subsets(a.labels)) {
    auto it = a.leaf.find(s);
    out.leaf[s].insert(intern(it == a.leaf.end() ? subset{} : it->second));
  }
  // Saturate: every operator applied to every tuple of reachable subsets.
  std::map<tree_automaton::op, std::set<std::vector<std::string>>> done;
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<subset> known = order;
    for (const auto& [r, k] : a.sch) {
      std::vector<std::vector<subset>> sets(k, known);
      for (std::size_t i = 1; i <= k; ++i) {
        auto tit = a.trans.find({r, i});
        for_each_product(sets, [&](const std::vector<subset>& from) {
          std::vector<std::string> names;
          for (const auto& s : from) names.push_back(name.at(s));
          if (!done[{r, i}].insert(names).second) return;
          subset to;
          if (tit != a.trans.end())
            for (const auto& [f, q] : tit->second) {
              bool ok = true;
              for (std::size_t j = 0; j < k && ok; ++j) ok = from[j].count(f[j]) != 0;
              if (ok) to.insert(q);
            }
          std::size_t before = name.size();
          out.trans[{r, i}].insert({names, intern(to)});
          grew = grew || name.size() != before;
        });
      }
    }
  }
  for (const auto& s : order) {
    out.states.insert(name.at(s));
    bool hits = std::any_of(s.begin(), s.end(), [&](const std::string& q) { return a.accept.count(q) != 0; });
    if (!hits) out.accept.insert(name.at(s));
  }
  return out;
}

tree_automaton project(const tree_automaton& a, const std::set<std::string>& keep) {
  for (const auto& x : keep)
    if (!a.labels.count(x)) fail(error_kind::precondition, "projection label " + x + " is not a label");
  tree_automaton out = a;
  out.labels = keep;
  out.leaf.clear();
  for (const auto& [s, qs] : a.leaf) {
    std::set<std::string> kept;
    std::set_intersection(s.begin(), s.end(), keep.begin(), keep.end(), std::inserter(kept, kept.end()));
    out.leaf[kept].insert(qs.begin(), qs.end());
  }
  return out;
}

program automaton_to_datalog(const tree_automaton& a) {
  a.validate();
  program p;
  p.in = a.full_schema();
  std::set<std::string> used;
  for (const auto& [r, k] : p.in) used.insert(r);
  detail::fresh_names names(used);
  std::string ans = names.claim("Ans");
  p.out[ans] = 0;
  std::map<std::string, std::string> e;
  for (const auto& q : a.states) {
    e[q] = names.claim("E_" + q);
    p.aux[e[q]] = 1;
    p.articulation[e[q]] = 1;
  }
  for (const auto& [s, qs] : a.leaf)
    for (const auto& q : qs) {
      if (!s.empty()) {
        rule r;
        r.head = {atom{e[q], {"x"}}};
        for (const auto& x : s) r.body.push_back(atom{x, {"x"}});
        p.rules.push_back(r);
        continue;
      }
      // Empty label set: one safe rule per input atom position.
      for (const auto& [rel, k] : p.in)
        for (std::size_t j = 0; j < k; ++j) {
          rule r;
          r.head = {atom{e[q], {"x"}}};
          atom b{rel, {}};
          for (std::size_t m = 0; m < k; ++m) b.args.push_back(m == j ? "x" : "y" + std::to_string(m + 1));
          r.body = {b};
          p.rules.push_back(r);
        }
    }
  for (const auto& [o, ts] : a.trans)
    for (const auto& [from, to] : ts) {
      rule r;
      atom b{o.first, {}};
      for (std::size_t j = 1; j <= from.size(); ++j) b.args.push_back("x" + std::to_string(j));
      r.head = {atom{e[to], {b.args[o.second - 1]}}};
      r.body.push_back(b);
      for (std::size_t j = 0; j < from.size(); ++j) r.body.push_back(atom{e[from[j]], {b.args[j]}});
      p.rules.push_back(r);
    }
  for (const auto& q : a.accept) {
    rule r;
    r.head = {atom{ans, {}}};
    r.body = {atom{e[q], {"x"}}};
    p.rules.push_back(r);
  }
  p.validate();
  return p;
}

std::vector<tree_term> enumerate_terms(const schema& s, const std::set<std::string>& labels, std::size_t depth,
                                       std::size_t cap) {
  std::vector<tree_term> all;
  for (const auto& l : label_subsets(labels)) all.push_back(tree_term::leaf(l));
  std::size_t prev = 0;
  for (std::size_t d = 1; d <= depth; ++d) {
    std::vector<tree_term> next;
    std::size_t now = all.size();
    for (const auto& [r, k] : s) {
      if (k == 0) continue;
      std::vector<std::size_t> idx(k, 0);
      // Tuples over all terms so far that use at least one term of depth d-1.
      while (true) {
        bool fresh = std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return i >= prev; });
        if (fresh)
          for (std::size_t i = 1; i <= k; ++i) {
            std::vector<tree_term> kids;
            for (auto j : idx) kids.push_back(all[j]);
            next.push_back(tree_term::down(r, i, std::move(kids)));
            if (now + next.size() > cap) fail(error_kind::cap_exceeded, "term enumeration exceeds cap");
          }
        std::size_t pos = 0;
        while (pos < k && ++idx[pos] == now) idx[pos++] = 0;
        if (pos == k) break;
      }
    }
    prev = now;
    for (auto& t : next) all.push_back(std::move(t));
  }
  return all;
}

tree_automaton parse_automaton(std::string_view text) {
  detail::cursor c(detail::lex(text));
  if (!c.is_keyword("automaton")) c.error("expected 'automaton'");
  c.next();
  tree_automaton a;
  auto section = [&]() { return c.is_ident() && c.is(":", 1); };
  auto item_start = [&]() { return section() || c.is_keyword("leaf") || c.is_keyword("trans") || c.at_end(); };
  if (c.is_keyword("over") && !c.is(":", 1)) {
    c.next();
    while (c.is_ident() && !section()) {
      detail::token name = c.expect_ident("relation name");
      c.expect("/");
      detail::token k = c.expect_ident("arity");
      if (!a.sch.emplace(name.text, detail::parse_arity(k, c)).second) c.error("relation " + name.text + " declared twice");
      c.accept(",");
    }
  }
  auto name_list = [&](std::set<std::string>& into) {
    while (!item_start()) {
      into.insert(c.expect_ident("name").text);
      c.accept(",");
    }
  };
  auto state = [&]() {
    detail::token t = c.expect_ident("state");
    if (!a.states.count(t.text)) c.error("undeclared state " + t.text);
    return t.text;
  };
  while (!c.at_end()) {
    if (c.is_keyword("labels") && c.is(":", 1)) {
      c.next();
      c.next();
      name_list(a.labels);
    } else if (c.is_keyword("states") && c.is(":", 1)) {
      c.next();
      c.next();
      name_list(a.states);
    } else if (c.is_keyword("accept") && c.is(":", 1)) {
      c.next();
      c.next();
      std::set<std::string> acc;
      name_list(acc);
      for (const auto& q : acc)
        if (!a.states.count(q)) c.error("undeclared state " + q);
      a.accept.insert(acc.begin(), acc.end());
    } else if (c.is_keyword("leaf")) {
      c.next();
      c.expect("{");
      std::set<std::string> s;
      while (!c.is("}")) {
        detail::token x = c.expect_ident("label");
        if (!a.labels.count(x.text)) c.error("undeclared label " + x.text);
        s.insert(x.text);
        c.accept(",");
      }
      c.expect("}");
      c.expect("->");
      a.leaf[s].insert(state());
    } else if (c.is_keyword("trans")) {
      c.next();
      detail::token r = c.expect_ident("relation");
      auto it = a.sch.find(r.text);
      if (it == a.sch.end()) c.error("undeclared relation " + r.text);
      detail::token i = c.expect_ident("index");
      std::size_t idx = detail::parse_arity(i, c);
      if (idx < 1 || idx > it->second) c.error("index out of range");
      c.expect("(");
      std::vector<std::string> from;
      while (!c.is(")")) {
        from.push_back(state());
        c.accept(",");
      }
      c.expect(")");
      if (from.size() != it->second) c.error("transition arity mismatch for " + r.text);
      c.expect("->");
      a.trans[{r.text, idx}].insert({from, state()});
    } else {
      c.error("unexpected '" + c.peek().text + "'");
    }
  }
  a.validate();
  return a;
}

std::string print_automaton(const tree_automaton& a) {
  std::ostringstream os;
  os << "automaton";
  if (!a.sch.empty()) {
    os << " over";
    bool first = true;
    for (const auto& [r, k] : a.sch) {
      os << (first ? " " : ", ") << r << "/" << k;
      first = false;
    }
  }
  os << "\n";
  auto list = [&](const char* head, const std::set<std::string>& xs) {
    os << head << ":";
    for (const auto& x : xs) os << " " << x;
    os << "\n";
  };
  list("labels", a.labels);
  list("states", a.states);
  list("accept", a.accept);
  for (const auto& [s, qs] : a.leaf)
    for (const auto& q : qs) {
      os << "leaf {";
      bool first = true;
      for (const auto& x : s) {
        os << (first ? "" : ",") << x;
        first = false;
      }
      os << "} -> " << q << "\n";
    }
  for (const auto& [o, ts] : a.trans)
    for (const auto& [from, to] : ts) {
      os << "trans " << o.first << " " << o.second << " (";
      for (std::size_t j = 0; j < from.size(); ++j) os << (j ? "," : "") << from[j];
      os << ") -> " << to << "\n";
    }
  return os.str();
}

}  // namespace homkit
