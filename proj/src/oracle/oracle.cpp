#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "homkit/oracle.hpp"
#include "homkit/program.hpp"
#include "homkit/syntax.hpp"

namespace homkit {

namespace {

std::atomic<std::size_t> g_jobs{0};

std::vector<element> elements_of_size(std::size_t m) {
  std::vector<element> out;
  for (std::size_t i = 1; i <= m; ++i) out.push_back(element::named("e" + std::to_string(i)));
  return out;
}

std::vector<fact> candidate_facts(const schema& s, const std::vector<element>& dom) {
  std::vector<fact> out;
  const std::size_t m = dom.size();
  for (const auto& [r, k] : s) {
    if (k > 0 && m == 0) continue;
    std::vector<std::size_t> idx(k, 0);
    bool done = false;
    while (!done) {
      fact f{r, {}};
      for (auto i : idx) f.args.push_back(dom[i]);
      out.push_back(std::move(f));
      done = true;
      for (std::size_t pos = k; pos-- > 0;) {
        if (++idx[pos] < m) {
          done = false;
          break;
        }
        idx[pos] = 0;
      }
    }
  }
  return out;
}

struct layer {
  std::vector<element> dom;
  std::vector<fact> facts;
  std::uint64_t count = 0;
};

std::vector<layer> layers(const schema& s, std::size_t max_domain) {
  std::vector<layer> out;
  for (std::size_t m = 0; m <= max_domain; ++m) {
    layer l;
    l.dom = elements_of_size(m);
    l.facts = candidate_facts(s, l.dom);
    if (l.facts.size() > 40) fail(error_kind::cap_exceeded, "enumeration over " + std::to_string(l.facts.size()) + " candidate facts");
    l.count = std::uint64_t{1} << l.facts.size();
    out.push_back(std::move(l));
  }
  return out;
}

instance build(const schema& s, const layer& l, std::uint64_t mask) {
  instance out(s);
  for (const auto& e : l.dom) out.add_element(e);
  for (std::size_t i = 0; i < l.facts.size(); ++i)
    if (mask >> i & 1) out.add_fact(l.facts[i]);
  return out;
}

struct failure_key {
  std::size_t m;
  std::size_t facts;
  std::string text;
  friend bool operator<(const failure_key& a, const failure_key& b) {
    return std::tie(a.m, a.facts, a.text) < std::tie(b.m, b.facts, b.text);
  }
};

}  // namespace

void set_oracle_jobs(std::size_t n) { g_jobs = n; }

std::size_t oracle_jobs() {
  std::size_t n = g_jobs;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

json to_json(const verdict& v) {
  json j;
  j["pass"] = v.pass;
  j["unknown"] = v.unknown;
  j["bound"] = v.bound;
  j["checked"] = v.checked;
  j["explanation"] = v.explanation;
  j["counterexample"] = v.counterexample ? json(print_instance(*v.counterexample)) : json(nullptr);
  return j;
}

std::size_t candidate_fact_count(const schema& s, std::size_t m) {
  return candidate_facts(s, elements_of_size(m)).size();
}

void for_each_instance(const schema& s, std::size_t max_domain, const std::function<bool(const instance&)>& visit,
                       const enum_options& opts) {
  for (const auto& l : layers(s, max_domain)) {
    std::vector<instance> seen;
    for (std::uint64_t mask = 0; mask < l.count; ++mask) {
      instance a = build(s, l, mask);
      if (opts.theory && !satisfies(a, *opts.theory)) continue;
      if (opts.dedupe_iso) {
        bool dup = std::any_of(seen.begin(), seen.end(), [&](const instance& b) { return isomorphic(a, b); });
        if (dup) continue;
        seen.push_back(a);
      }
      if (!visit(a)) return;
    }
  }
}

std::vector<instance> enumerate_instances(const schema& s, std::size_t max_domain, const enum_options& opts) {
  std::vector<instance> out;
  for_each_instance(s, max_domain, [&](const instance& a) {
    out.push_back(a);
    return true;
  }, opts);
  return out;
}

verdict search_counterexample(const schema& s, std::size_t bound, const instance_check& check, const enum_options& opts) {
  std::vector<layer> ls = layers(s, bound);
  std::vector<std::uint64_t> offset{0};
  for (const auto& l : ls) offset.push_back(offset.back() + l.count);
  const std::uint64_t total = offset.back();

  std::atomic<std::uint64_t> next{0};
  std::atomic<std::size_t> best_m{static_cast<std::size_t>(-1)};
  std::atomic<std::size_t> checked{0};
  std::mutex mu;
  std::optional<failure_key> best;
  std::optional<std::pair<instance, std::string>> best_failure;
  std::exception_ptr err;
  constexpr std::uint64_t chunk = 16;

  auto worker = [&]() {
    try {
      while (true) {
        std::uint64_t start = next.fetch_add(chunk);
        if (start >= total) return;
        std::uint64_t end = std::min(total, start + chunk);
        for (std::uint64_t idx = start; idx < end; ++idx) {
          std::size_t m = static_cast<std::size_t>(std::upper_bound(offset.begin(), offset.end(), idx) - offset.begin() - 1);
          if (m > best_m.load()) return;
          instance a = build(s, ls[m], idx - offset[m]);
          if (opts.theory && !satisfies(a, *opts.theory)) continue;
          ++checked;
          auto f = check(a);
          if (!f) continue;
          failure_key key{m, f->first.facts().size(), print_instance(f->first)};
          std::lock_guard<std::mutex> lock(mu);
          if (!best || key < *best) {
            best = key;
            best_failure = std::move(f);
            std::size_t cur = best_m.load();
            while (m < cur && !best_m.compare_exchange_weak(cur, m)) {
            }
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
      next = total;
    }
  };

  std::size_t n = std::min<std::uint64_t>(oracle_jobs(), std::max<std::uint64_t>(1, total / chunk));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);

  verdict v;
  v.bound = bound;
  v.checked = checked;
  if (best_failure) {
    v.pass = false;
    v.counterexample = best_failure->first;
    v.explanation = best_failure->second;
  }
  return v;
}

namespace {

instance widen(const instance& a, const schema& s) {
  instance out(merge_schemas(s, a.sch()));
  for (const auto& e : a.domain()) out.add_element(e);
  for (const auto& f : a.facts()) out.add_fact(f);
  if (a.pointed()) out.set_points(a.points());
  return out;
}

void for_each_tuple(const std::vector<element>& dom, std::size_t k, const std::function<void(const std::vector<element>&)>& f) {
  std::vector<std::size_t> idx(k, 0);
  if (k > 0 && dom.empty()) return;
  while (true) {
    std::vector<element> t;
    for (auto i : idx) t.push_back(dom[i]);
    f(t);
    std::size_t pos = k;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < dom.size()) {
        done = false;
        break;
      }
      idx[pos] = 0;
    }
    if (done) return;
  }
}

}  // namespace

verdict verify_duality(const duality_spec& d, std::size_t bound) {
  schema s;
  if (d.generator) s = d.generator->prog.in;
  for (const auto& a : d.frontier) s = merge_schemas(s, a.sch());
  for (const auto& b : d.duals) s = merge_schemas(s, b.sch());
  if (d.theory) s = merge_schemas(s, d.theory->sch);
  std::vector<instance> frontier, duals;
  for (const auto& a : d.frontier) frontier.push_back(widen(a, s));
  for (const auto& b : d.duals) duals.push_back(widen(b, s));
  std::optional<program> gen;
  if (d.generator) gen = restrict_output(d.generator->prog, d.generator->rel);

  enum_options eo;
  eo.theory = d.theory;
  return search_counterexample(s, bound, [&](const instance& c) -> std::optional<std::pair<instance, std::string>> {
    std::optional<instance> out;
    if (gen) out = chase_any(*gen, as_input(*gen, c)).output;
    std::vector<element> dom(c.domain().begin(), c.domain().end());
    std::optional<std::pair<instance, std::string>> bad;
    for_each_tuple(dom, d.arity, [&](const std::vector<element>& t) {
      if (bad) return;
      instance cc = d.arity ? c.with_points(t) : c;
      bool up = false;
      if (gen) up = out->contains(fact{d.generator->rel, t});
      for (const auto& a : frontier) {
        if (up) break;
        up = find_homomorphism(a, cc).has_value();
      }
      bool down = false;
      for (const auto& b : duals) {
        if (down) break;
        down = find_homomorphism(cc, b).has_value();
      }
      if (up && down) bad.emplace(cc, "instance is above the frontier and below a dual");
      if (!up && !down) bad.emplace(cc, "instance is neither above the frontier nor below a dual");
    });
    return bad;
  }, eo);
}

tri output_maps_to(const pipeline& pl, const instance& i, const instance& j, const element_map& bindings, std::size_t depth) {
  auto attempt = [&](std::size_t d, bool& exact) {
    pipeline_result r = run_pipeline(pl, i, d);
    exact = r.terminated;
    instance src = r.output.trimmed();
    hom_options opts;
    for (const auto& [x, y] : bindings)
      if (src.domain().count(x)) opts.bindings.emplace(x, y);
    return find_homomorphism(src, j, opts).has_value();
  };
  bool exact = false;
  bool first = attempt(depth, exact);
  if (exact || !first) return first ? tri::yes : tri::no;
  bool second = attempt(2 * depth, exact);
  return second ? tri::yes : tri::no;
}

verdict verify_adjoint(const pipeline& pl, const instance& j, const adjoint_result& res, std::size_t bound) {
  constexpr std::size_t max_witnesses = 16;
  std::atomic<bool> unknown{false};
  verdict v = search_counterexample(pl.in(), bound, [&](const instance& i) -> std::optional<std::pair<instance, std::string>> {
    tri lhs = output_maps_to(pl, i, j);
    if (lhs == tri::unknown) {
      unknown = true;
      return std::nullopt;
    }
    bool rhs = false;
    for (std::size_t mi = 0; mi < res.members.size(); ++mi) {
      const auto& mem = res.members[mi];
      std::size_t seen = 0;
      std::optional<std::string> diagram_bad;
      for_each_homomorphism(i, mem.j_prime, {}, [&](const element_map& h) {
        rhs = true;
        element_map comp;
        for (const auto& [x, y] : h) {
          auto it = mem.iota.find(y);
          if (it != mem.iota.end()) comp.emplace(x, it->second);
        }
        if (output_maps_to(pl, i, j, comp) != tri::yes)
          diagram_bad = "diagram fails for member " + std::to_string(mi);
        return !diagram_bad && ++seen < max_witnesses;
      });
      if (diagram_bad) return std::make_pair(i, *diagram_bad);
    }
    if ((lhs == tri::yes) != rhs)
      return std::make_pair(i, lhs == tri::yes ? std::string("P(I) maps to J but I maps to no member")
                                               : std::string("I maps to a member but P(I) does not map to J"));
    return std::nullopt;
  });
  if (unknown) {
    v.unknown = true;
    if (v.pass) v.explanation = "bounded chase did not stabilise on some instance";
  }
  return v;
}

verdict programs_equivalent_bounded(const pipeline& p1, const pipeline& p2, std::size_t bound) {
  if (p1.in() != p2.in() || p1.out() != p2.out()) fail(error_kind::schema, "programs have different input or output schemas");
  return search_counterexample(p1.in(), bound, [&](const instance& i) -> std::optional<std::pair<instance, std::string>> {
    instance o1 = run_pipeline(p1, i).output;
    instance o2 = run_pipeline(p2, i).output;
    if (!hom_equivalent(o1, o2, i.domain())) return std::make_pair(i, std::string("outputs are not hom-equivalent over the input domain"));
    return std::nullopt;
  });
}

}  // namespace homkit
