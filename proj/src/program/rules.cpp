#include "detail/rules.hpp"

namespace homkit::detail {

std::set<std::string> program_vars(const program& p) {
  std::set<std::string> out;
  for (const auto& r : p.rules) {
    auto b = vars_of(r.body);
    auto h = vars_of(r.head);
    out.insert(b.begin(), b.end());
    out.insert(h.begin(), h.end());
    out.insert(r.existentials.begin(), r.existentials.end());
  }
  return out;
}

std::set<std::string> relation_names(const program& p) {
  std::set<std::string> out;
  for (const auto* s : {&p.in, &p.out, &p.aux})
    for (const auto& [r, k] : *s) out.insert(r);
  return out;
}

std::vector<rule> safe_extensions(const rule& r, const std::set<std::string>& needed, const schema& s_in,
                                  fresh_names& vars) {
  auto present = r.body_vars();
  std::vector<std::string> missing;
  for (const auto& v : needed)
    if (!present.count(v)) missing.push_back(v);
  std::vector<rule> out{r};
  if (missing.empty()) return out;
  std::vector<std::pair<std::string, std::size_t>> slots;
  for (const auto& [rel, k] : s_in)
    for (std::size_t pos = 0; pos < k; ++pos) slots.emplace_back(rel, pos);
  if (slots.empty()) fail(error_kind::unsupported, "cannot make rule safe: no input relation of positive arity");
  for (const auto& v : missing) {
    std::vector<rule> next;
    for (const auto& base : out) {
      for (const auto& [rel, pos] : slots) {
        atom a{rel, {}};
        for (std::size_t i = 0; i < s_in.at(rel); ++i) a.args.push_back(i == pos ? v : vars.next("f"));
        rule ext = base;
        ext.body.push_back(std::move(a));
        next.push_back(std::move(ext));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace homkit::detail
