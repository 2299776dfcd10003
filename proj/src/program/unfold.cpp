#include <deque>

#include "detail/rules.hpp"
#include "homkit/program.hpp"

namespace homkit {

namespace {

struct derived_rule {
  atom head;
  std::vector<atom> body;
};

std::string bucket_key(const instance& a) {
  std::map<std::string, std::size_t> counts;
  for (const auto& f : a.facts()) ++counts[f.rel];
  std::string key = std::to_string(a.domain().size()) + "|" + std::to_string(a.points().size());
  for (const auto& [r, n] : counts) key += "|" + r + ":" + std::to_string(n);
  return key;
}

}  // namespace

std::vector<instance> unfoldings(const program& p, const std::string& r, int depth) {
  if (!p.is_datalog()) fail(error_kind::precondition, "unfoldings: program has existential rules");
  if (!p.out.count(r) && !p.aux.count(r)) fail(error_kind::precondition, "unfoldings: unknown derived relation " + r);
  if (depth < 0) fail(error_kind::precondition, "unfoldings: negative depth");
  detail::fresh_names vars(detail::program_vars(p));

  std::vector<instance> out;
  std::map<std::string, std::vector<std::size_t>> buckets;
  auto record = [&](const derived_rule& d) {
    instance a = canonical_instance(d.body, p.in, d.head.args);
    auto& bucket = buckets[bucket_key(a)];
    for (std::size_t i : bucket)
      if (isomorphic(out[i], a)) return;
    bucket.push_back(out.size());
    out.push_back(std::move(a));
  };

  std::deque<std::pair<derived_rule, int>> queue;
  for (const auto& rl : p.rules)
    if (rl.head.front().rel == r) queue.push_back({derived_rule{rl.head.front(), rl.body}, 0});
  while (!queue.empty()) {
    auto [d, steps] = std::move(queue.front());
    queue.pop_front();
    std::size_t pos = d.body.size();
    for (std::size_t i = 0; i < d.body.size(); ++i)
      if (!p.in.count(d.body[i].rel)) {
        pos = i;
        break;
      }
    if (pos == d.body.size()) {
      record(d);
      continue;
    }
    if (steps == depth) continue;
    const atom target = d.body[pos];
    for (const auto& rl : p.rules) {
      if (rl.head.front().rel != target.rel) continue;
      std::map<std::string, std::string> rename;
      for (const auto& v : rl.body_vars()) rename[v] = vars.next("w");
      for (const auto& v : rl.head_vars())
        if (!rename.count(v)) rename[v] = vars.next("w");
      // Unify renamed head arguments with the target atom.
      std::map<std::string, std::string> parent;
      std::function<std::string(const std::string&)> find = [&](const std::string& v) -> std::string {
        auto it = parent.find(v);
        if (it == parent.end() || it->second == v) return v;
        return it->second = find(it->second);
      };
      const atom& h = rl.head.front();
      for (std::size_t i = 0; i < h.args.size(); ++i) {
        std::string a = find(rename[h.args[i]]);
        std::string b = find(target.args[i]);
        if (a != b) parent[a] = b;
      }
      auto subst = [&](const atom& a) {
        atom b{a.rel, {}};
        for (const auto& v : a.args) b.args.push_back(find(v));
        return b;
      };
      derived_rule next{subst(d.head), {}};
      for (std::size_t i = 0; i < pos; ++i) next.body.push_back(subst(d.body[i]));
      for (const auto& a : rl.body) {
        atom ren{a.rel, {}};
        for (const auto& v : a.args) ren.args.push_back(rename[v]);
        next.body.push_back(subst(ren));
      }
      for (std::size_t i = pos + 1; i < d.body.size(); ++i) next.body.push_back(subst(d.body[i]));
      queue.push_back({std::move(next), steps + 1});
    }
  }
  return out;
}

}  // namespace homkit
