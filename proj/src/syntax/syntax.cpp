#include <fstream>
#include <sstream>

#include "detail/lexer.hpp"
#include "homkit/syntax.hpp"

namespace homkit {

using detail::cursor;
using detail::lex;
using detail::tok;
using detail::token;

namespace {

bool reserved_element(const std::string& s) {
  if (s == "_bot") return true;
  if (s.size() > 2 && s[0] == '_' && s[1] == 'n') {
    for (std::size_t i = 2; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  }
  return false;
}

token user_ident(cursor& c, const char* what) {
  token t = c.expect_ident(what);
  if (t.text[0] == '_') {
    fail(error_kind::parse, std::to_string(t.line) + ":" + std::to_string(t.col) + ": identifier '" + t.text + "' uses the reserved prefix '_'");
  }
  return t;
}

fact parse_fact_tokens(cursor& c);

element parse_element_tokens(cursor& c) {
  if (c.accept("(")) {
    element first = parse_element_tokens(c);
    c.expect("|");
    c.expect("{");
    std::vector<fact> fs;
    if (!c.is("}")) {
      do fs.push_back(parse_fact_tokens(c));
      while (c.accept(","));
    }
    c.expect("}");
    c.expect(")");
    return element::pair(first, std::move(fs));
  }
  token t = c.expect_ident("element");
  if (t.text[0] == '_') {
    if (!reserved_element(t.text)) c.error("identifier '" + t.text + "' uses the reserved prefix '_'");
    if (t.text == "_bot") return element::bottom();
    return element::null(std::stoull(t.text.substr(2)));
  }
  return element::named(t.text);
}

fact parse_fact_tokens(cursor& c) {
  fact f{user_ident(c, "relation name").text, {}};
  c.expect("(");
  if (!c.is(")")) {
    do f.args.push_back(parse_element_tokens(c));
    while (c.accept(","));
  }
  c.expect(")");
  return f;
}

atom parse_atom(cursor& c) {
  atom a{user_ident(c, "relation name").text, {}};
  c.expect("(");
  if (!c.is(")")) {
    do a.args.push_back(user_ident(c, "variable").text);
    while (c.accept(","));
  }
  c.expect(")");
  return a;
}

std::vector<atom> parse_atom_list(cursor& c) {
  std::vector<atom> out;
  out.push_back(parse_atom(c));
  while (c.accept(",")) out.push_back(parse_atom(c));
  return out;
}

std::vector<std::string> parse_var_list(cursor& c) {
  std::vector<std::string> out;
  out.push_back(user_ident(c, "variable").text);
  while (c.accept(",")) out.push_back(user_ident(c, "variable").text);
  return out;
}

// `Name/k` items separated by commas or whitespace; stops at `word:` or a
// bare keyword in `stops`.
template <typename Visit>
void parse_rel_list(cursor& c, std::initializer_list<const char*> stops, Visit visit) {
  while (c.is_ident()) {
    if (c.is(":", 1) || c.is("(", 1)) return;
    for (const char* s : stops)
      if (c.is_keyword(s)) return;
    token name = user_ident(c, "relation name");
    c.expect("/");
    token k = c.expect_ident("arity");
    std::size_t arity = detail::parse_arity(k, c);
    std::size_t art = 0;
    if (c.accept("@")) {
      token p = c.expect_ident("articulation position");
      art = detail::parse_arity(p, c);
    }
    visit(name, arity, art);
    c.accept(",");
  }
}

void add_rel(schema& s, const token& name, std::size_t arity) {
  if (!s.emplace(name.text, arity).second)
    fail(error_kind::schema, std::to_string(name.line) + ":" + std::to_string(name.col) + ": relation " + name.text + " declared twice");
}

rule parse_rule(cursor& c) {
  rule r;
  if (c.is_keyword("exists") && !c.is("(", 1)) {
    c.next();
    r.existentials = parse_var_list(c);
    c.expect(":");
  }
  r.head = parse_atom_list(c);
  c.expect(":-");
  if (!c.is(".")) r.body = parse_atom_list(c);
  c.expect(".");
  return r;
}

}  // namespace

element parse_element(std::string_view text) {
  cursor c(lex(text));
  element e = parse_element_tokens(c);
  if (!c.at_end()) c.error("trailing input after element");
  return e;
}

program parse_program(std::string_view text) {
  cursor c(lex(text));
  program p;
  bool header = false;
  if (c.is_keyword("program") && !c.is("(", 1)) {
    header = true;
    c.next();
    while (c.is_ident() && c.is(":", 1)) {
      token kw = c.next();
      c.next();
      schema* target = nullptr;
      if (kw.text == "in") target = &p.in;
      else if (kw.text == "out") target = &p.out;
      else if (kw.text == "aux") target = &p.aux;
      else fail(error_kind::parse, std::to_string(kw.line) + ":" + std::to_string(kw.col) + ": unknown header field '" + kw.text + "'");
      parse_rel_list(c, {"rules"}, [&](const token& name, std::size_t k, std::size_t art) {
        add_rel(*target, name, k);
        if (art) {
          if (target != &p.aux) c.error("articulation position on non-aux relation " + name.text);
          p.articulation[name.text] = art;
        }
      });
    }
    if (!c.is_keyword("rules")) c.error("expected 'rules'");
    c.next();
  }
  while (!c.at_end()) p.rules.push_back(parse_rule(c));
  if (!header) {
    std::set<std::string> heads, bodies;
    schema all;
    for (const auto& r : p.rules) {
      for (const auto& a : r.head) heads.insert(a.rel);
      for (const auto& a : r.body) bodies.insert(a.rel);
      all = merge_schemas(all, schema_of(r.head));
      all = merge_schemas(all, schema_of(r.body));
    }
    for (const auto& [r, k] : all) {
      if (!heads.count(r)) p.in.emplace(r, k);
      else if (bodies.count(r)) p.aux.emplace(r, k);
      else p.out.emplace(r, k);
    }
  }
  p.validate();
  return p;
}

instance parse_instance(std::string_view text) {
  cursor c(lex(text));
  if (!c.is_keyword("instance")) c.error("expected 'instance'");
  c.next();
  schema s;
  if (c.is_keyword("over") && !c.is("(", 1)) {
    c.next();
    parse_rel_list(c, {}, [&](const token& name, std::size_t k, std::size_t art) {
      if (art) c.error("articulation position not allowed in instance schema");
      add_rel(s, name, k);
    });
  }
  instance out(s);
  std::vector<element> pts;
  bool have_points = false;
  auto element_list = [&](std::vector<element>& into) {
    while (!c.at_end()) {
      if (c.is_ident() && (c.is(":", 1) || c.is("(", 1))) break;
      if (!c.is_ident() && !c.is("(")) break;
      into.push_back(parse_element_tokens(c));
      c.accept(",");
    }
  };
  while (!c.at_end()) {
    if (c.is_keyword("domain") && c.is(":", 1)) {
      c.next();
      c.next();
      std::vector<element> dom;
      element_list(dom);
      for (const auto& e : dom) out.add_element(e);
    } else if (c.is_keyword("points") && c.is(":", 1)) {
      c.next();
      c.next();
      if (have_points) c.error("points declared twice");
      have_points = true;
      element_list(pts);
    } else {
      fact f = parse_fact_tokens(c);
      c.expect(".");
      out.add_fact(f);
    }
  }
  if (have_points) out.set_points(std::move(pts));
  return out;
}

tgd_set parse_tgds(std::string_view text) {
  cursor c(lex(text));
  tgd_set out;
  bool declared = false;
  if (c.is_keyword("tgds") && !c.is("(", 1)) {
    c.next();
    declared = true;
    if (c.is_keyword("over") && !c.is("(", 1)) {
      c.next();
      parse_rel_list(c, {}, [&](const token& name, std::size_t k, std::size_t art) {
        if (art) c.error("articulation position not allowed in TGD schema");
        add_rel(out.sch, name, k);
      });
    }
  }
  while (!c.at_end()) {
    tgd t;
    if (!c.is("->")) t.body = parse_atom_list(c);
    c.expect("->");
    if (c.is_keyword("exists") && !c.is("(", 1)) {
      c.next();
      t.existentials = parse_var_list(c);
      c.expect(":");
    }
    t.head = parse_atom_list(c);
    c.expect(".");
    if (!declared) {
      out.sch = merge_schemas(out.sch, schema_of(t.body));
      out.sch = merge_schemas(out.sch, schema_of(t.head));
    }
    out.deps.push_back(std::move(t));
  }
  out.validate();
  return out;
}

ucq parse_query(std::string_view text) {
  cursor c(lex(text));
  if (!c.is_keyword("query")) c.error("expected 'query'");
  c.next();
  ucq q;
  q.name = user_ident(c, "query name").text;
  c.expect("/");
  q.arity = detail::parse_arity(c.expect_ident("arity"), c);
  bool declared = false;
  if (c.is_keyword("over") && !c.is("(", 1)) {
    c.next();
    declared = true;
    parse_rel_list(c, {}, [&](const token& name, std::size_t k, std::size_t art) {
      if (art) c.error("articulation position not allowed in query schema");
      add_rel(q.sch, name, k);
    });
  }
  while (!c.at_end()) {
    cq d;
    c.expect("(");
    if (!c.is(")")) d.answer = parse_var_list(c);
    c.expect(")");
    c.expect(":-");
    if (!c.is(".")) d.body = parse_atom_list(c);
    c.expect(".");
    if (!declared) q.sch = merge_schemas(q.sch, schema_of(d.body));
    q.disjuncts.push_back(std::move(d));
  }
  q.validate();
  return q;
}

std::string schema_string(const schema& s) {
  std::string out;
  bool first = true;
  for (const auto& [r, k] : s) {
    if (!first) out += ", ";
    first = false;
    out += r + "/" + std::to_string(k);
  }
  return out;
}

std::string print_program(const program& p) {
  std::ostringstream os;
  os << "program\n";
  auto line = [&](const char* kw, const schema& s, bool art) {
    os << kw << ":";
    for (const auto& [r, k] : s) {
      os << " " << r << "/" << k;
      if (art) {
        auto it = p.articulation.find(r);
        if (it != p.articulation.end()) os << " @" << it->second;
      }
    }
    os << "\n";
  };
  line("in", p.in, false);
  line("out", p.out, false);
  line("aux", p.aux, true);
  os << "rules\n";
  for (const auto& r : p.rules) os << to_string(r) << "\n";
  return os.str();
}

std::string print_instance(const instance& a) {
  std::ostringstream os;
  os << "instance over";
  if (!a.sch().empty()) os << " " << schema_string(a.sch());
  os << "\n";
  std::set<element> implied = a.active_domain();
  implied.insert(a.points().begin(), a.points().end());
  if (implied != a.domain()) {
    os << "domain:";
    for (const auto& e : a.domain()) os << " " << e.key();
    os << "\n";
  }
  for (const auto& f : a.facts()) os << f.key() << ".\n";
  if (!a.points().empty()) {
    os << "points:";
    for (const auto& e : a.points()) os << " " << e.key();
    os << "\n";
  }
  return os.str();
}

std::string print_tgds(const tgd_set& s) {
  std::ostringstream os;
  os << "tgds over";
  if (!s.sch.empty()) os << " " << schema_string(s.sch);
  os << "\n";
  for (const auto& t : s.deps) os << to_string(t) << "\n";
  return os.str();
}

std::string print_query(const ucq& q) {
  std::ostringstream os;
  os << "query " << q.name << "/" << q.arity;
  if (!q.sch.empty()) os << " over " << schema_string(q.sch);
  os << "\n";
  for (const auto& d : q.disjuncts) os << to_string(d) << "\n";
  return os.str();
}

json to_json(const schema& s) {
  json j = json::object();
  for (const auto& [r, k] : s) j[r] = k;
  return j;
}

json to_json(const instance& a) {
  json j;
  j["schema"] = to_json(a.sch());
  j["domain"] = json::array();
  for (const auto& e : a.domain()) j["domain"].push_back(e.key());
  j["facts"] = json::array();
  for (const auto& f : a.facts()) {
    json row = json::array({f.rel});
    for (const auto& e : f.args) row.push_back(e.key());
    j["facts"].push_back(row);
  }
  j["points"] = json::array();
  for (const auto& e : a.points()) j["points"].push_back(e.key());
  return j;
}

json to_json(const program& p) {
  json j;
  j["in"] = to_json(p.in);
  j["out"] = to_json(p.out);
  j["aux"] = to_json(p.aux);
  j["articulation"] = json::object();
  for (const auto& [r, k] : p.articulation) j["articulation"][r] = k;
  j["rules"] = json::array();
  for (const auto& r : p.rules) j["rules"].push_back(to_string(r));
  return j;
}

json to_json(const tgd_set& s) {
  json j;
  j["schema"] = to_json(s.sch);
  j["tgds"] = json::array();
  for (const auto& t : s.deps) j["tgds"].push_back(to_string(t));
  return j;
}

json to_json(const ucq& q) {
  json j;
  j["name"] = q.name;
  j["arity"] = q.arity;
  j["schema"] = to_json(q.sch);
  j["disjuncts"] = json::array();
  for (const auto& d : q.disjuncts) j["disjuncts"].push_back(to_string(d));
  return j;
}

json to_json(const element_map& h) {
  json j = json::object();
  for (const auto& [x, y] : h) j[x.key()] = y.key();
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(error_kind::parse, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(error_kind::precondition, "cannot write " + path);
  out << text;
}

}  // namespace homkit
