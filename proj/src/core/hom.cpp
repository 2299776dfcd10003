#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "detail/tuples.hpp"
#include "homkit/core.hpp"

namespace homkit {

namespace {

using detail::vec_hash;

struct target_rel {
  std::size_t arity = 0;
  std::vector<std::vector<int>> tuples;
  std::unordered_set<std::vector<int>, vec_hash> members;
  // index[pos][value] -> tuple indices
  std::vector<std::unordered_map<int, std::vector<int>>> index;
};

struct target_index {
  std::vector<element> elems;
  std::unordered_map<element, int> id;
  std::map<std::string, target_rel> rels;

  explicit target_index(const instance& b) {
    for (const auto& e : b.domain()) {
      id.emplace(e, static_cast<int>(elems.size()));
      elems.push_back(e);
    }
    for (const auto& [r, k] : b.sch()) {
      auto& tr = rels[r];
      tr.arity = k;
      tr.index.resize(k);
    }
    for (const auto& f : b.facts()) {
      auto& tr = rels[f.rel];
      std::vector<int> t;
      t.reserve(f.args.size());
      for (const auto& e : f.args) t.push_back(id.at(e));
      int ti = static_cast<int>(tr.tuples.size());
      for (std::size_t p = 0; p < t.size(); ++p) tr.index[p][t[p]].push_back(ti);
      tr.members.insert(t);
      tr.tuples.push_back(std::move(t));
    }
  }
};

struct source_fact {
  const target_rel* rel;
  std::vector<int> vars;
};

class searcher {
 public:
  searcher(const instance& a, const instance& b, const hom_options& opts) : t_(b), opts_(opts) {
    if (a.sch() != b.sch()) {
      for (const auto& [r, k] : a.sch()) {
        auto it = b.sch().find(r);
        if (it == b.sch().end() || it->second != k) fail(error_kind::schema, "homomorphism between instances over different schemas (relation " + r + ")");
      }
    }
    for (const auto& e : a.domain()) {
      vid_.emplace(e, static_cast<int>(vars_.size()));
      vars_.push_back(e);
    }
    for (const auto& f : a.facts()) {
      source_fact sf{&t_.rels.at(f.rel), {}};
      for (const auto& e : f.args) sf.vars.push_back(vid_.at(e));
      if (sf.vars.empty()) {
        if (sf.rel->tuples.empty()) impossible_ = true;
        continue;
      }
      facts_.push_back(std::move(sf));
    }
    assign_.assign(vars_.size(), -1);
    used_.assign(t_.elems.size(), 0);
    for (const auto& [x, y] : opts.bindings) {
      auto xi = vid_.find(x);
      if (xi == vid_.end()) fail(error_kind::precondition, "binding for element " + x.key() + " outside source domain");
      auto yi = t_.id.find(y);
      if (yi == t_.id.end()) fail(error_kind::precondition, "binding target " + y.key() + " outside target domain");
      bind(xi->second, yi->second);
    }
    if (opts.use_points && a.pointed() && b.pointed()) {
      if (a.points().size() != b.points().size()) fail(error_kind::precondition, "point arity mismatch");
      for (std::size_t i = 0; i < a.points().size(); ++i) bind(vid_.at(a.points()[i]), t_.id.at(b.points()[i]));
    }
    if (opts.injective && vars_.size() > t_.elems.size()) impossible_ = true;
    plan();
  }

  void run(const std::function<bool(const element_map&)>& visit) {
    if (impossible_) return;
    for (const auto& sf : facts_) {
      bool all = true;
      for (int v : sf.vars) all = all && assign_[v] >= 0;
      if (all && !holds(sf)) return;
    }
    visit_ = &visit;
    descend(0);
  }

 private:
  void bind(int x, int y) {
    if (assign_[x] >= 0 && assign_[x] != y) {
      impossible_ = true;
      return;
    }
    if (assign_[x] < 0) {
      if (opts_.injective && used_[y]) impossible_ = true;
      assign_[x] = y;
      used_[y] = 1;
    }
  }

  bool holds(const source_fact& sf) const {
    std::vector<int> t(sf.vars.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = assign_[sf.vars[i]];
    return sf.rel->members.count(t) != 0;
  }

  void plan() {
    std::vector<char> placed(vars_.size(), 0);
    for (std::size_t v = 0; v < vars_.size(); ++v) placed[v] = assign_[v] >= 0;
    std::vector<std::vector<int>> facts_of(vars_.size());
    for (std::size_t i = 0; i < facts_.size(); ++i)
      for (int v : facts_[i].vars) facts_of[v].push_back(static_cast<int>(i));
    for (auto& fo : facts_of) fo.erase(std::unique(fo.begin(), fo.end()), fo.end());
    std::size_t free_count = 0;
    for (char p : placed) free_count += !p;
    while (order_.size() < free_count) {
      int best = -1;
      long best_score = -1;
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (placed[v]) continue;
        long linked = 0;
        for (int fi : facts_of[v])
          for (int w : facts_[fi].vars)
            if (placed[w]) ++linked;
        long score = linked * 1000 + static_cast<long>(facts_of[v].size());
        if (score > best_score) {
          best_score = score;
          best = static_cast<int>(v);
        }
      }
      placed[best] = 1;
      order_.push_back(best);
    }
    // Per step: anchor fact, facts completed at this step, facts to forward-check.
    std::vector<int> pos(vars_.size(), -1);
    for (std::size_t i = 0; i < order_.size(); ++i) pos[order_[i]] = static_cast<int>(i);
    steps_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) {
      int v = order_[i];
      auto& st = steps_[i];
      st.var = v;
      int best_bound = -1;
      for (int fi : facts_of[v]) {
        int bound = 0;
        bool complete = true;
        for (int w : facts_[fi].vars) {
          bool earlier = pos[w] < static_cast<int>(i);  // pre-bound vars have pos -1
          if (w != v && earlier) ++bound;
          if (w != v && !earlier) complete = false;
        }
        if (complete) st.check.push_back(fi);
        else st.forward.push_back(fi);
        long key = bound * 4 + (bound > 0 ? 2 : 0);
        if (key > best_bound || (key == best_bound && facts_[fi].rel->tuples.size() < facts_[st.anchor].rel->tuples.size())) {
          best_bound = static_cast<int>(key);
          st.anchor = fi;
        }
      }
    }
  }

  void candidates(std::size_t step, std::vector<int>& out) const {
    const auto& st = steps_[step];
    out.clear();
    if (st.anchor < 0) {
      if (opts_.injective) {
        for (std::size_t y = 0; y < t_.elems.size(); ++y)
          if (!used_[y]) out.push_back(static_cast<int>(y));
      } else if (!t_.elems.empty()) {
        out.push_back(0);
      }
      return;
    }
    const auto& sf = facts_[st.anchor];
    const target_rel& tr = *sf.rel;
    // Pick the bound position with the shortest posting list.
    const std::vector<int>* posting = nullptr;
    for (std::size_t p = 0; p < sf.vars.size(); ++p) {
      int w = sf.vars[p];
      if (w == st.var || assign_[w] < 0) continue;
      auto it = tr.index[p].find(assign_[w]);
      if (it == tr.index[p].end()) return;
      if (!posting || it->second.size() < posting->size()) posting = &it->second;
    }
    auto consider = [&](const std::vector<int>& t) {
      int val = -1;
      for (std::size_t p = 0; p < sf.vars.size(); ++p) {
        int w = sf.vars[p];
        if (w == st.var) {
          if (val >= 0 && t[p] != val) return;
          val = t[p];
        } else if (assign_[w] >= 0 && assign_[w] != t[p]) {
          return;
        }
      }
      out.push_back(val);
    };
    if (posting) {
      for (int ti : *posting) consider(tr.tuples[ti]);
    } else {
      for (const auto& t : tr.tuples) consider(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  bool supported(const source_fact& sf) const {
    const target_rel& tr = *sf.rel;
    for (std::size_t p = 0; p < sf.vars.size(); ++p) {
      int y = assign_[sf.vars[p]];
      if (y < 0) continue;
      if (tr.index[p].find(y) == tr.index[p].end()) return false;
    }
    return true;
  }

  bool descend(std::size_t step) {
    if (step == order_.size()) {
      element_map h;
      for (std::size_t v = 0; v < vars_.size(); ++v) h.emplace(vars_[v], t_.elems[assign_[v]]);
      return (*visit_)(h);
    }
    std::vector<int> cand;
    candidates(step, cand);
    const auto& st = steps_[step];
    for (int y : cand) {
      if (opts_.injective && used_[y]) continue;
      assign_[st.var] = y;
      used_[y] = 1;
      bool ok = true;
      for (int fi : st.check)
        if (!holds(facts_[fi])) {
          ok = false;
          break;
        }
      if (ok)
        for (int fi : st.forward)
          if (!supported(facts_[fi])) {
            ok = false;
            break;
          }
      if (ok && !descend(step + 1)) return false;
      assign_[st.var] = -1;
      used_[y] = 0;
    }
    return true;
  }

  struct step {
    int var = -1;
    int anchor = -1;
    std::vector<int> check;
    std::vector<int> forward;
  };

  target_index t_;
  hom_options opts_;
  std::vector<element> vars_;
  std::unordered_map<element, int> vid_;
  std::vector<source_fact> facts_;
  std::vector<int> assign_;
  std::vector<char> used_;
  std::vector<int> order_;
  std::vector<step> steps_;
  bool impossible_ = false;
  const std::function<bool(const element_map&)>* visit_ = nullptr;
};

}  // namespace

void for_each_homomorphism(const instance& a, const instance& b, const hom_options& opts,
                           const std::function<bool(const element_map&)>& visit) {
  searcher s(a, b, opts);
  s.run(visit);
}

std::optional<element_map> find_homomorphism(const instance& a, const instance& b, const hom_options& opts) {
  std::optional<element_map> found;
  for_each_homomorphism(a, b, opts, [&](const element_map& h) {
    found = h;
    return false;
  });
  return found;
}

std::optional<element_map> find_homomorphism(const instance& a, const instance& b, const std::set<element>& fixed) {
  hom_options opts;
  for (const auto& x : fixed) {
    if (!a.domain().count(x) || !b.domain().count(x)) fail(error_kind::precondition, "fixed element " + x.key() + " not in both domains");
    opts.bindings.emplace(x, x);
  }
  return find_homomorphism(a, b, opts);
}

bool is_homomorphism(const instance& a, const instance& b, const element_map& h) {
  for (const auto& e : a.domain()) {
    auto it = h.find(e);
    if (it == h.end() || !b.domain().count(it->second)) return false;
  }
  for (const auto& f : a.facts())
    if (!b.contains(apply(h, f))) return false;
  if (a.pointed() && b.pointed()) {
    if (a.points().size() != b.points().size()) return false;
    for (std::size_t i = 0; i < a.points().size(); ++i)
      if (h.at(a.points()[i]) != b.points()[i]) return false;
  }
  return true;
}

bool hom_equivalent(const instance& a, const instance& b, const std::set<element>& fixed) {
  return find_homomorphism(a, b, fixed).has_value() && find_homomorphism(b, a, fixed).has_value();
}

bool isomorphic(const instance& a, const instance& b) {
  if (a.sch() != b.sch()) fail(error_kind::schema, "isomorphism test between instances over different schemas");
  if (a.domain().size() != b.domain().size() || a.facts().size() != b.facts().size()) return false;
  if (a.pointed() != b.pointed() || a.points().size() != b.points().size()) return false;
  std::map<std::string, std::size_t> ca, cb;
  for (const auto& f : a.facts()) ++ca[f.rel];
  for (const auto& f : b.facts()) ++cb[f.rel];
  if (ca != cb) return false;
  hom_options opts;
  opts.injective = true;
  return find_homomorphism(a, b, opts).has_value();
}

}  // namespace homkit
