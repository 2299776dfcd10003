#include "detail/rules.hpp"
#include "homkit/program.hpp"

namespace homkit {

std::string in_name(const std::string& rel) { return rel + "_in"; }
std::string out_name(const std::string& rel) { return rel + "_out"; }

program tgd_compile(const tgd_set& sigma) {
  sigma.validate();
  program p;
  p.aux = sigma.sch;
  for (const auto& [r, k] : sigma.sch) {
    p.in[in_name(r)] = k;
    p.out[out_name(r)] = k;
  }
  auto vars = [](std::size_t k) {
    std::vector<std::string> xs;
    for (std::size_t i = 1; i <= k; ++i) xs.push_back("x" + std::to_string(i));
    return xs;
  };
  for (const auto& [r, k] : sigma.sch) p.rules.push_back(rule{{atom{r, vars(k)}}, {}, {atom{in_name(r), vars(k)}}});
  for (const auto& t : sigma.deps) p.rules.push_back(rule{t.head, t.existentials, t.body});
  for (const auto& [r, k] : sigma.sch) p.rules.push_back(rule{{atom{out_name(r), vars(k)}}, {}, {atom{r, vars(k)}}});
  p.validate();
  return p;
}

program pultr_compile(const cq& phi_v, const cq& phi_e) {
  const std::size_t k = phi_v.answer.size();
  if (phi_e.answer.size() != 2 * k)
    fail(error_kind::schema, "pultr_compile: edge query arity " + std::to_string(phi_e.answer.size()) + " is not twice " + std::to_string(k));
  const schema graph{{"V", 1}, {"E", 2}};
  for (const auto* q : {&phi_v, &phi_e})
    for (const auto& a : q->body) {
      auto it = graph.find(a.rel);
      if (it == graph.end() || it->second != a.args.size())
        fail(error_kind::schema, "pultr_compile: atom " + to_string(a) + " is not over V/1, E/2");
    }
  program p;
  p.in = schema{{in_name("V"), 1}, {in_name("E"), 2}};
  p.out = schema{{out_name("V"), 1}, {out_name("E"), 2}};
  std::vector<std::string> rs;
  for (std::size_t i = 1; i <= k; ++i) {
    rs.push_back("R" + std::to_string(i));
    p.aux[rs.back()] = 2;
  }
  // Query variables get a prefix so they cannot meet y/u/v.
  auto lift = [](const cq& q) {
    std::vector<atom> body;
    for (const auto& a : q.body) {
      atom b{in_name(a.rel), {}};
      for (const auto& v : a.args) b.args.push_back("q" + v);
      body.push_back(std::move(b));
    }
    return body;
  };
  rule vertex{{atom{out_name("V"), {"y"}}}, {"y"}, lift(phi_v)};
  for (std::size_t i = 0; i < k; ++i) vertex.head.push_back(atom{rs[i], {"y", "q" + phi_v.answer[i]}});
  p.rules.push_back(vertex);
  rule edge{{atom{out_name("E"), {"u", "v"}}}, {}, lift(phi_e)};
  for (std::size_t i = 0; i < k; ++i) {
    edge.body.push_back(atom{rs[i], {"u", "q" + phi_e.answer[i]}});
    edge.body.push_back(atom{rs[i], {"v", "q" + phi_e.answer[k + i]}});
  }
  p.rules.push_back(edge);
  p.validate();
  return p;
}

}  // namespace homkit
