#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "homkit/adjoint.hpp"
#include "homkit/automata.hpp"
#include "homkit/chase.hpp"
#include "homkit/duality.hpp"
#include "homkit/oracle.hpp"
#include "homkit/program.hpp"
#include "homkit/syntax.hpp"
#include "homkit/ucq.hpp"

using namespace homkit;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_usage = 2;
constexpr int exit_cap = 3;

struct globals {
  bool json_out = false;
  std::size_t jobs = 0;
};

globals g;

void emit(const json& j, const std::string& text) {
  if (g.json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

program load_program(const std::string& path) { return parse_program(read_file(path)); }
instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }
tgd_set load_tgds(const std::string& path) { return parse_tgds(read_file(path)); }
tree_automaton load_automaton(const std::string& path) { return parse_automaton(read_file(path)); }

std::vector<instance> load_instances(const std::vector<std::string>& paths) {
  std::vector<instance> out;
  for (const auto& p : paths) out.push_back(load_instance(p));
  return out;
}

cq single_cq(const std::string& path) {
  ucq q = parse_query(read_file(path));
  if (q.disjuncts.size() != 1) fail(error_kind::precondition, path + ": expected a single conjunctive query");
  return q.disjuncts[0];
}

json certificate(const std::string& command, json construction, const std::optional<verdict>& v) {
  json j;
  j["tool-version"] = HOMKIT_VERSION;
  j["command"] = command;
  j["construction"] = std::move(construction);
  j["verification"] = v ? to_json(*v) : json(nullptr);
  return j;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(error_kind::precondition, "cannot create " + dir + ": " + ec.message());
}

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

std::string verdict_text(const verdict& v) {
  std::string s = std::string("verdict: ") + (v.pass ? "pass" : "fail") + (v.unknown ? " (unknown cases)" : "") +
                  ", bound " + std::to_string(v.bound) + ", checked " + std::to_string(v.checked) + "\n";
  if (!v.explanation.empty()) s += "explanation: " + v.explanation + "\n";
  if (v.counterexample) s += "counterexample:\n" + print_instance(*v.counterexample);
  return s;
}

int verdict_code(const verdict& v) { return v.pass ? exit_ok : exit_negative; }

std::string classification_text(const classification& c) {
  std::ostringstream os;
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "tam: " << b(c.tam) << ", connected: " << b(c.connected) << ", tree_shaped: " << b(c.tree_shaped)
     << ", almost_monadic: " << b(c.almost_monadic) << ", simple: " << b(c.simple) << ", monadic: " << b(c.monadic)
     << ", strongly_linear: " << b(c.strongly_linear) << ", weakly_acyclic: " << b(c.weakly_acyclic)
     << ", non_recursive: " << b(c.non_recursive) << ", boolean: " << b(c.boolean_program) << "\n";
  if (c.witness) {
    os << "articulation:";
    for (const auto& [r, p] : *c.witness) os << " " << r << "@" << p;
    os << "\n";
  }
  return os.str();
}

element_map parse_iota(const json& j) {
  element_map h;
  for (const auto& [k, v] : j.items()) h[parse_element(k)] = parse_element(v.get<std::string>());
  return h;
}

// ---- classify ----

struct classify_args {
  std::string prog;
};

int cmd_classify(const classify_args& a) {
  classification c = classify(load_program(a.prog));
  emit(to_json(c), classification_text(c));
  return exit_ok;
}

// ---- chase ----

struct chase_args {
  std::string prog, inst;
  std::string mode = "wa";
  std::size_t max_steps = 10000;
  bool full = false;
};

int cmd_chase(const chase_args& a) {
  program p = load_program(a.prog);
  instance i = load_instance(a.inst);
  chase_result r;
  if (p.is_datalog()) {
    r = chase_datalog(p, i);
  } else {
    chase_options o;
    o.mode = a.mode == "bounded" ? chase_mode::bounded : chase_mode::require_weakly_acyclic;
    o.max_steps = a.max_steps;
    r = chase_existential(p, i, o);
  }
  const instance& shown = a.full ? r.full : r.output;
  json j;
  j["output"] = to_json(shown);
  j["terminated"] = r.terminated;
  j["steps"] = r.steps;
  j["rounds"] = r.rounds;
  emit(j, print_instance(shown));
  if (!r.terminated) {
    std::cerr << "homkit: chase stopped after " << r.steps << " steps (--max-steps); output is a prefix\n";
    return exit_cap;
  }
  return exit_ok;
}

// ---- unfold ----

struct unfold_args {
  std::string prog, rel;
  int depth = 2;
  std::string out_dir;
};

int cmd_unfold(const unfold_args& a) {
  auto us = unfoldings(load_program(a.prog), a.rel, a.depth);
  json j;
  j["relation"] = a.rel;
  j["depth"] = a.depth;
  j["unfoldings"] = json::array();
  std::string text;
  if (!a.out_dir.empty()) ensure_dir(a.out_dir);
  for (std::size_t i = 0; i < us.size(); ++i) {
    j["unfoldings"].push_back(to_json(us[i]));
    text += "# unfolding " + std::to_string(i + 1) + "\n" + print_instance(us[i]) + "\n";
    if (!a.out_dir.empty()) {
      write_file(join(a.out_dir, "unfolding_" + std::to_string(i + 1) + ".inst"), print_instance(us[i]));
    }
  }
  emit(j, text);
  return exit_ok;
}

// ---- adjoint ----

struct adjoint_args {
  std::string prog, target;
  std::string method = "auto";
  std::size_t cap = 1000000;
  std::string out_dir;
  std::optional<std::size_t> verify;
};

adjoint_method method_of(const std::string& m) {
  if (m == "tam") return adjoint_method::tam;
  if (m == "sl") return adjoint_method::sl;
  return adjoint_method::automatic;
}

int cmd_adjoint(const adjoint_args& a) {
  program p = load_program(a.prog);
  instance j = load_instance(a.target);
  adjoint_options o;
  o.cap = a.cap;
  adjoint_result res = adjoint_for(p, method_of(a.method), o)(j);
  std::optional<verdict> v;
  if (a.verify) v = verify_adjoint(pipeline(p), j, res, *a.verify);

  json out;
  out["members"] = json::array();
  std::string text;
  if (!a.out_dir.empty()) ensure_dir(a.out_dir);
  for (std::size_t i = 0; i < res.members.size(); ++i) {
    const auto& m = res.members[i];
    out["members"].push_back({{"instance", to_json(m.j_prime)}, {"iota", to_json(m.iota)}});
    text += "# member " + std::to_string(i + 1) + "\n" + print_instance(m.j_prime) + "\n";
    if (!a.out_dir.empty()) {
      std::string base = "member_" + std::to_string(i + 1);
      write_file(join(a.out_dir, base + ".inst"), print_instance(m.j_prime));
      write_file(join(a.out_dir, base + ".iota.json"), to_json(m.iota).dump(2) + "\n");
    }
  }
  json construction = {{"method", a.method}, {"members", res.members.size()}, {"cap", a.cap}};
  json cert = certificate("adjoint", construction, v);
  if (!a.out_dir.empty()) write_file(join(a.out_dir, "certificate.json"), cert.dump(2) + "\n");
  out["certificate"] = cert;
  if (v) text += verdict_text(*v);
  emit(out, text);
  return v ? verdict_code(*v) : exit_ok;
}

// ---- dualize ----

struct dualize_args {
  std::string prog, rel;
  std::vector<std::string> frontier;
  std::string theory, rewrite;
  bool abox = false;
  bool minimize = false;
  std::optional<std::size_t> verify;
  std::string out_dir;
};

int cmd_dualize(const dualize_args& a) {
  if (a.prog.empty() == a.frontier.empty()) fail(error_kind::precondition, "give exactly one of --program or --frontier");
  if (!a.prog.empty() && a.rel.empty()) fail(error_kind::precondition, "--program needs --rel");
  dual_options o;
  o.minimize = a.minimize;
  duality d;
  json construction;
  if (!a.theory.empty()) {
    if (a.frontier.empty()) fail(error_kind::precondition, "--theory needs --frontier");
    tgd_set sigma = load_tgds(a.theory);
    theory_options t;
    t.dual = o;
    if (!a.rewrite.empty()) t.rewrite = pipeline(load_program(a.rewrite));
    std::vector<instance> f = load_instances(a.frontier);
    d = a.abox ? abox_dual(sigma, f, t) : dual_wrt_theory(sigma, f, t);
    construction = {{"route", a.abox ? "abox" : "relative"}, {"rewrite", !a.rewrite.empty()}};
  } else if (!a.prog.empty()) {
    d = dual_from_program(load_program(a.prog), a.rel, o);
    construction = {{"route", "program"}, {"relation", a.rel}};
  } else {
    std::vector<instance> f = load_instances(a.frontier);
    std::size_t k = f.empty() ? 0 : f[0].points().size();
    d = dual_from_program(frontier_program(f, k), "R", o);
    d.frontier = f;
    construction = {{"route", "frontier"}};
  }
  construction["minimize"] = a.minimize;
  construction["duals"] = d.duals.size();
  construction["arity"] = d.arity;
  std::optional<verdict> v;
  if (a.verify) v = verify(d, *a.verify);

  json out;
  out["duals"] = json::array();
  std::string text;
  for (std::size_t i = 0; i < d.duals.size(); ++i) {
    out["duals"].push_back(to_json(d.duals[i]));
    text += "# dual " + std::to_string(i + 1) + "\n" + print_instance(d.duals[i]) + "\n";
  }
  json cert = certificate("dualize", construction, v);
  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    for (std::size_t i = 0; i < d.duals.size(); ++i)
      write_file(join(a.out_dir, "dual_" + std::to_string(i + 1) + ".inst"), print_instance(d.duals[i]));
    write_file(join(a.out_dir, "certificate.json"), cert.dump(2) + "\n");
  }
  out["certificate"] = cert;
  if (v) text += verdict_text(*v);
  emit(out, text);
  return v ? verdict_code(*v) : exit_ok;
}

// ---- characterize ----

struct characterize_args {
  std::string query, theory, rewrite;
  bool abox = false;
  std::optional<std::size_t> verify;
  std::string out_dir;
};

int cmd_characterize(const characterize_args& a) {
  ucq q = parse_query(read_file(a.query));
  tgd_set sigma = a.theory.empty() ? tgd_set{q.sch, {}} : load_tgds(a.theory);
  theory_options t;
  if (!a.rewrite.empty()) t.rewrite = pipeline(load_program(a.rewrite));
  example_set ex = a.abox ? characterize_abox(q, sigma, t) : characterize(q, sigma, t);
  std::optional<verdict> v;
  if (a.verify) v = verify_characterization(q, ex, *a.verify);

  json construction = {{"mode", a.abox ? "abox" : "model"},
                       {"positives", ex.positives.size()},
                       {"negatives", ex.negatives.size()},
                       {"rewrite", !a.rewrite.empty()}};
  json cert = certificate("characterize", construction, v);
  std::string text;
  for (std::size_t i = 0; i < ex.positives.size(); ++i)
    text += "# positive " + std::to_string(i + 1) + "\n" + print_instance(ex.positives[i]) + "\n";
  for (std::size_t i = 0; i < ex.negatives.size(); ++i)
    text += "# negative " + std::to_string(i + 1) + "\n" + print_instance(ex.negatives[i]) + "\n";
  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    for (std::size_t i = 0; i < ex.positives.size(); ++i)
      write_file(join(a.out_dir, "pos_" + std::to_string(i + 1) + ".inst"), print_instance(ex.positives[i]));
    for (std::size_t i = 0; i < ex.negatives.size(); ++i)
      write_file(join(a.out_dir, "neg_" + std::to_string(i + 1) + ".inst"), print_instance(ex.negatives[i]));
    write_file(join(a.out_dir, "certificate.json"), cert.dump(2) + "\n");
  }
  json out = to_json(ex);
  out["certificate"] = cert;
  if (v) text += verdict_text(*v);
  emit(out, text);
  return v ? verdict_code(*v) : exit_ok;
}

// ---- hom ----

struct hom_args {
  std::string source, target;
  bool injective = false;
};

int cmd_hom(const hom_args& a) {
  hom_options o;
  o.injective = a.injective;
  auto h = find_homomorphism(load_instance(a.source), load_instance(a.target), o);
  json j;
  j["hom"] = h ? to_json(*h) : json(nullptr);
  std::string text;
  if (h)
    for (const auto& [x, y] : *h) text += x.key() + " -> " + y.key() + "\n";
  else
    text = "no homomorphism\n";
  emit(j, text);
  return h ? exit_ok : exit_negative;
}

// ---- verify ----

struct verify_args {
  std::string kind;
  std::vector<std::string> files;
  std::string prog, rel, theory, method = "auto";
  std::vector<std::string> frontier, duals, members;
  bool abox = false;
  std::size_t max_size = 3;
};

int cmd_verify(const verify_args& a) {
  verdict v;
  if (a.kind == "duality") {
    duality d;
    if (!a.prog.empty()) {
      if (a.rel.empty()) fail(error_kind::precondition, "--program needs --rel");
      program p = load_program(a.prog);
      d.generator = frontier_generator{restrict_output(p, a.rel), a.rel};
      d.arity = p.out.at(a.rel);
    }
    d.frontier = load_instances(a.frontier);
    d.duals = load_instances(a.duals);
    if (!d.generator) {
      const auto& any = d.frontier.empty() ? d.duals : d.frontier;
      d.arity = any.empty() ? 0 : any[0].points().size();
    }
    if (!a.theory.empty()) {
      d.theory = load_tgds(a.theory);
      d.category = a.abox ? duality_category::abox : duality_category::relative;
    }
    v = verify(d, a.max_size);
  } else if (a.kind == "adjoint") {
    if (a.files.size() != 2) fail(error_kind::precondition, "verify adjoint needs <program> <target>");
    program p = load_program(a.files[0]);
    instance j = load_instance(a.files[1]);
    adjoint_result res;
    if (a.members.empty()) {
      res = adjoint_for(p, method_of(a.method))(j);
    } else {
      res.source = j;
      for (const auto& m : a.members) {
        adjoint_member mem{load_instance(m), {}};
        fs::path sidecar = fs::path(m).replace_extension(".iota.json");
        if (fs::exists(sidecar)) mem.iota = parse_iota(json::parse(read_file(sidecar.string())));
        res.members.push_back(std::move(mem));
      }
    }
    v = verify_adjoint(pipeline(p), j, res, a.max_size);
  } else if (a.kind == "equiv") {
    if (a.files.size() != 2) fail(error_kind::precondition, "verify equiv needs two programs");
    v = programs_equivalent_bounded(pipeline(load_program(a.files[0])), pipeline(load_program(a.files[1])), a.max_size);
  } else {
    fail(error_kind::precondition, "unknown verification kind " + a.kind);
  }
  emit(to_json(v), verdict_text(v));
  return verdict_code(v);
}

// ---- automaton ----

struct automaton_args {
  std::string action;
  std::vector<std::string> files;
  std::vector<std::string> keep;
  std::size_t cap = 1u << 16;
};

int cmd_automaton(const automaton_args& a) {
  auto need = [&](std::size_t n) {
    if (a.files.size() != n)
      fail(error_kind::precondition, "automaton " + a.action + " takes " + std::to_string(n) + " file(s)");
  };
  if (a.action == "compile") {
    need(1);
    program p = automaton_to_datalog(load_automaton(a.files[0]));
    emit({{"program", to_json(p)}}, print_program(p));
    return exit_ok;
  }
  if (a.action == "run") {
    need(2);
    tree_automaton m = load_automaton(a.files[0]);
    tree_term t = tree_to_term(load_instance(a.files[1]), m.labels);
    auto states = run_states(m, t);
    bool ok = run(m, t);
    json j = {{"accepted", ok}, {"states", states}, {"term", to_string(t)}};
    emit(j, std::string("accepted: ") + (ok ? "true" : "false") + "\nterm: " + to_string(t) + "\n");
    return ok ? exit_ok : exit_negative;
  }
  tree_automaton r;
  if (a.action == "union") {
    need(2);
    r = automaton_union(load_automaton(a.files[0]), load_automaton(a.files[1]));
  } else if (a.action == "complement") {
    need(1);
    r = complement(load_automaton(a.files[0]), a.cap);
  } else if (a.action == "project") {
    need(1);
    std::set<std::string> keep;
    for (const auto& x : a.keep)
      if (!x.empty()) keep.insert(x);
    r = project(load_automaton(a.files[0]), keep);
  } else {
    fail(error_kind::precondition, "unknown automaton action " + a.action);
  }
  std::string text = print_automaton(r);
  emit({{"automaton", text}, {"states", r.states.size()}}, text);
  return exit_ok;
}

// ---- tgd / pultr compile ----

struct compile_args {
  std::string input;
  std::string vertex, edge;
};

int cmd_tgd_compile(const compile_args& a) {
  program p = tgd_compile(load_tgds(a.input));
  emit({{"program", to_json(p)}}, print_program(p));
  return exit_ok;
}

int cmd_pultr_compile(const compile_args& a) {
  program p = pultr_compile(single_cq(a.vertex), single_cq(a.edge));
  emit({{"program", to_json(p)}}, print_program(p));
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homkit: Datalog, chase, adjoints and homomorphism dualities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(HOMKIT_VERSION));
  app.add_flag("--json", g.json_out, "Print JSON instead of text");
  app.add_option("--jobs", g.jobs, "Oracle worker threads (0 = all cores)");
  std::function<int()> action;
  auto json_flag = [](CLI::App* s) {
    s->add_flag("--json", g.json_out, "Print JSON instead of text");
    s->add_option("--jobs", g.jobs, "Oracle worker threads (0 = all cores)");
  };

  classify_args cl;
  auto* s_classify = app.add_subcommand("classify", "Syntactic classification of a program");
  s_classify->add_option("program", cl.prog)->required()->check(CLI::ExistingFile);
  json_flag(s_classify);
  s_classify->callback([&] { action = [&] { return cmd_classify(cl); }; });

  chase_args ch;
  auto* s_chase = app.add_subcommand("chase", "Run a program on an instance");
  s_chase->add_option("program", ch.prog)->required()->check(CLI::ExistingFile);
  s_chase->add_option("instance", ch.inst)->required()->check(CLI::ExistingFile);
  s_chase->add_option("--mode", ch.mode, "wa (weakly acyclic only) or bounded")
      ->check(CLI::IsMember({"wa", "bounded"}))
      ->capture_default_str();
  s_chase->add_option("--max-steps", ch.max_steps, "Existential firing budget")->capture_default_str();
  s_chase->add_flag("--full", ch.full, "Print the full result including auxiliary relations");
  json_flag(s_chase);
  s_chase->callback([&] { action = [&] { return cmd_chase(ch); }; });

  unfold_args un;
  auto* s_unfold = app.add_subcommand("unfold", "Unfoldings of a Datalog program");
  s_unfold->add_option("program", un.prog)->required()->check(CLI::ExistingFile);
  s_unfold->add_option("--rel", un.rel, "Relation to unfold")->required();
  s_unfold->add_option("--depth", un.depth, "Substitution steps")->capture_default_str();
  s_unfold->add_option("-o,--out", un.out_dir, "Directory for unfolding files");
  json_flag(s_unfold);
  s_unfold->callback([&] { action = [&] { return cmd_unfold(un); }; });

  adjoint_args ad;
  auto* s_adjoint = app.add_subcommand("adjoint", "Generalized right-adjoint of a program at a target");
  s_adjoint->add_option("program", ad.prog)->required()->check(CLI::ExistingFile);
  s_adjoint->add_option("target", ad.target)->required()->check(CLI::ExistingFile);
  s_adjoint->add_option("--method", ad.method)->check(CLI::IsMember({"auto", "tam", "sl"}))->capture_default_str();
  s_adjoint->add_option("--cap", ad.cap, "Candidate cap for the TAM construction")->capture_default_str();
  s_adjoint->add_option("-o,--out", ad.out_dir, "Directory for member files");
  s_adjoint->add_option("--verify", ad.verify, "Run the bounded oracle up to this domain size");
  json_flag(s_adjoint);
  s_adjoint->callback([&] { action = [&] { return cmd_adjoint(ad); }; });

  dualize_args du;
  auto* s_dualize = app.add_subcommand("dualize", "Synthesize a dual set");
  s_dualize->add_option("--program", du.prog)->check(CLI::ExistingFile);
  s_dualize->add_option("--rel", du.rel);
  s_dualize->add_option("--frontier", du.frontier)->check(CLI::ExistingFile);
  s_dualize->add_option("--theory", du.theory)->check(CLI::ExistingFile);
  s_dualize->add_option("--rewrite", du.rewrite, "Program equivalent to the compiled theory")->check(CLI::ExistingFile);
  s_dualize->add_flag("--abox", du.abox);
  s_dualize->add_flag("--minimize", du.minimize);
  s_dualize->add_option("--verify", du.verify);
  s_dualize->add_option("-o,--out", du.out_dir);
  json_flag(s_dualize);
  s_dualize->callback([&] { action = [&] { return cmd_dualize(du); }; });

  characterize_args ca;
  auto* s_char = app.add_subcommand("characterize", "Uniquely characterizing examples for a UCQ");
  s_char->add_option("query", ca.query)->required()->check(CLI::ExistingFile);
  s_char->add_option("--theory", ca.theory)->check(CLI::ExistingFile);
  s_char->add_option("--rewrite", ca.rewrite)->check(CLI::ExistingFile);
  s_char->add_flag("--abox", ca.abox);
  s_char->add_option("--verify", ca.verify);
  s_char->add_option("-o,--out", ca.out_dir);
  json_flag(s_char);
  s_char->callback([&] { action = [&] { return cmd_characterize(ca); }; });

  hom_args ho;
  auto* s_hom = app.add_subcommand("hom", "Find a homomorphism between instances");
  s_hom->add_option("source", ho.source)->required()->check(CLI::ExistingFile);
  s_hom->add_option("target", ho.target)->required()->check(CLI::ExistingFile);
  s_hom->add_flag("--injective", ho.injective);
  json_flag(s_hom);
  s_hom->callback([&] { action = [&] { return cmd_hom(ho); }; });

  verify_args ve;
  auto* s_verify = app.add_subcommand("verify", "Bounded oracle checks");
  s_verify->add_option("kind", ve.kind, "duality, adjoint or equiv")
      ->required()
      ->check(CLI::IsMember({"duality", "adjoint", "equiv"}));
  s_verify->add_option("files", ve.files)->check(CLI::ExistingFile);
  s_verify->add_option("--program", ve.prog)->check(CLI::ExistingFile);
  s_verify->add_option("--rel", ve.rel);
  s_verify->add_option("--frontier", ve.frontier)->check(CLI::ExistingFile);
  s_verify->add_option("--duals", ve.duals)->check(CLI::ExistingFile);
  s_verify->add_option("--member", ve.members, "Adjoint members (iota read from <name>.iota.json)")
      ->check(CLI::ExistingFile);
  s_verify->add_option("--method", ve.method)->check(CLI::IsMember({"auto", "tam", "sl"}));
  s_verify->add_option("--theory", ve.theory)->check(CLI::ExistingFile);
  s_verify->add_flag("--abox", ve.abox);
  s_verify->add_option("--max-size", ve.max_size, "Largest domain enumerated")->capture_default_str();
  json_flag(s_verify);
  s_verify->callback([&] { action = [&] { return cmd_verify(ve); }; });

  automaton_args au;
  auto* s_aut = app.add_subcommand("automaton", "Tree automata");
  s_aut->add_option("action", au.action)
      ->required()
      ->check(CLI::IsMember({"compile", "run", "union", "complement", "project"}));
  s_aut->add_option("files", au.files)->check(CLI::ExistingFile);
  s_aut->add_option("--keep", au.keep, "Labels kept by project")->expected(0, 1 << 16);
  s_aut->add_option("--cap", au.cap, "State cap for complement")->capture_default_str();
  json_flag(s_aut);
  s_aut->callback([&] { action = [&] { return cmd_automaton(au); }; });

  compile_args tg;
  auto* s_tgd = app.add_subcommand("tgd", "TGD tools");
  s_tgd->require_subcommand(1);
  auto* s_tgd_compile = s_tgd->add_subcommand("compile", "Compile TGDs to an existential Datalog program");
  s_tgd_compile->add_option("tgds", tg.input)->required()->check(CLI::ExistingFile);
  json_flag(s_tgd_compile);
  s_tgd_compile->callback([&] { action = [&] { return cmd_tgd_compile(tg); }; });

  compile_args pu;
  auto* s_pultr = app.add_subcommand("pultr", "Pultr functor tools");
  s_pultr->require_subcommand(1);
  auto* s_pultr_compile = s_pultr->add_subcommand("compile", "Compile a Pultr functor to existential Datalog");
  s_pultr_compile->add_option("--vertex", pu.vertex, "Query file for the vertex formula")->required()->check(CLI::ExistingFile);
  s_pultr_compile->add_option("--edge", pu.edge, "Query file for the edge formula")->required()->check(CLI::ExistingFile);
  json_flag(s_pultr_compile);
  s_pultr_compile->callback([&] { action = [&] { return cmd_pultr_compile(pu); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  set_oracle_jobs(g.jobs);
  try {
    return action ? action() : exit_usage;
  } catch (const error& e) {
    std::cerr << "homkit: " << e.what() << "\n";
    return e.kind() == error_kind::cap_exceeded ? exit_cap : exit_usage;
  } catch (const json::exception& e) {
    std::cerr << "homkit: " << e.what() << "\n";
    return exit_usage;
  }
}
