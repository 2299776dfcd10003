#include <algorithm>

#include "homkit/core.hpp"

namespace homkit {

struct element::node {
  element_kind kind;
  std::string name;
  std::uint64_t serial = 0;
  std::vector<element> first;  // size 1 for pairs
  std::vector<fact> facts;
  std::string key;
  std::size_t hash = 0;
};

namespace {

std::shared_ptr<const element::node> make_node(element::node n) {
  n.hash = std::hash<std::string>{}(n.key);
  return std::make_shared<const element::node>(std::move(n));
}

const std::shared_ptr<const element::node>& bottom_node() {
  static const std::shared_ptr<const element::node> b = [] {
    element::node n;
    n.kind = element_kind::bottom;
    n.key = "_bot";
    return make_node(std::move(n));
  }();
  return b;
}

}  // namespace

element::element() : n_(bottom_node()) {}

element element::named(std::string name) {
  node n;
  n.kind = element_kind::named;
  n.key = name;
  n.name = std::move(name);
  return element(make_node(std::move(n)));
}

element element::null(std::uint64_t serial) {
  node n;
  n.kind = element_kind::null;
  n.serial = serial;
  n.key = "_n" + std::to_string(serial);
  return element(make_node(std::move(n)));
}

element element::bottom() { return element(bottom_node()); }

element element::pair(const element& first, std::vector<fact> facts) {
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  node n;
  n.kind = element_kind::pair;
  n.key = "(" + first.key() + "|{";
  for (std::size_t i = 0; i < facts.size(); ++i) {
    if (i) n.key += ",";
    n.key += facts[i].key();
  }
  n.key += "})";
  n.first.push_back(first);
  n.facts = std::move(facts);
  return element(make_node(std::move(n)));
}

element_kind element::kind() const { return n_->kind; }
const std::string& element::name() const { return n_->name; }
std::uint64_t element::serial() const { return n_->serial; }
const element& element::first() const {
  if (n_->kind != element_kind::pair) fail(error_kind::precondition, "first() on non-pair element " + key());
  return n_->first.front();
}
const std::vector<fact>& element::pair_facts() const { return n_->facts; }
const std::string& element::key() const { return n_->key; }
std::size_t element::hash() const { return n_->hash; }

bool operator==(const element& a, const element& b) {
  return a.n_ == b.n_ || (a.n_->hash == b.n_->hash && a.n_->key == b.n_->key);
}
bool operator<(const element& a, const element& b) { return a.n_ != b.n_ && a.n_->key < b.n_->key; }

std::string fact::key() const {
  std::string s = rel + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += args[i].key();
  }
  return s + ")";
}

bool operator<(const fact& a, const fact& b) {
  if (a.rel != b.rel) return a.rel < b.rel;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

schema merge_schemas(const schema& a, const schema& b) {
  schema out = a;
  for (const auto& [r, k] : b) {
    auto [it, fresh] = out.emplace(r, k);
    if (!fresh && it->second != k) fail(error_kind::schema, "relation " + r + " used with arities " + std::to_string(it->second) + " and " + std::to_string(k));
  }
  return out;
}

fact apply(const element_map& h, const fact& f) {
  fact g{f.rel, {}};
  g.args.reserve(f.args.size());
  for (const auto& e : f.args) {
    auto it = h.find(e);
    g.args.push_back(it == h.end() ? e : it->second);
  }
  return g;
}

void instance::add_relation(const std::string& rel, std::size_t arity) {
  schema_ = merge_schemas(schema_, schema{{rel, arity}});
}

void instance::add_fact(const fact& f) {
  auto it = schema_.find(f.rel);
  if (it == schema_.end()) fail(error_kind::schema, "relation " + f.rel + " not in schema");
  if (it->second != f.args.size()) fail(error_kind::schema, "fact " + f.key() + " has wrong arity for " + f.rel + "/" + std::to_string(it->second));
  for (const auto& e : f.args) domain_.insert(e);
  facts_.insert(f);
}

void instance::set_points(std::vector<element> pts) {
  for (const auto& e : pts) domain_.insert(e);
  points_ = std::move(pts);
  pointed_ = !points_.empty();
}

void instance::clear_points() {
  points_.clear();
  pointed_ = false;
}

std::set<element> instance::active_domain() const {
  std::set<element> out;
  for (const auto& f : facts_)
    for (const auto& e : f.args) out.insert(e);
  return out;
}

instance instance::reduct(const schema& keep, bool shrink_domain) const {
  instance out;
  for (const auto& [r, k] : keep) {
    auto it = schema_.find(r);
    if (it != schema_.end() && it->second != k) fail(error_kind::schema, "reduct arity mismatch on " + r);
    out.schema_.emplace(r, k);
  }
  for (const auto& f : facts_)
    if (keep.count(f.rel)) out.facts_.insert(f);
  if (shrink_domain) {
    out.domain_ = out.active_domain();
  } else {
    out.domain_ = domain_;
  }
  out.points_ = points_;
  out.pointed_ = pointed_;
  for (const auto& p : points_) out.domain_.insert(p);
  return out;
}

instance instance::trimmed() const {
  instance out = *this;
  out.domain_ = active_domain();
  for (const auto& p : points_) out.domain_.insert(p);
  return out;
}

instance instance::renamed(const std::map<std::string, std::string>& rel_map) const {
  instance out;
  auto ren = [&](const std::string& r) {
    auto it = rel_map.find(r);
    return it == rel_map.end() ? r : it->second;
  };
  for (const auto& [r, k] : schema_) out.add_relation(ren(r), k);
  out.domain_ = domain_;
  for (const auto& f : facts_) out.facts_.insert(fact{ren(f.rel), f.args});
  out.points_ = points_;
  out.pointed_ = pointed_;
  return out;
}

instance instance::with_points(std::vector<element> pts) const {
  instance out = *this;
  out.set_points(std::move(pts));
  return out;
}

instance instance::image(const element_map& h, const schema& target_schema) const {
  instance out(target_schema);
  for (const auto& e : domain_) {
    auto it = h.find(e);
    out.add_element(it == h.end() ? e : it->second);
  }
  for (const auto& f : facts_) out.add_fact(apply(h, f));
  if (pointed_) {
    std::vector<element> pts;
    for (const auto& p : points_) {
      auto it = h.find(p);
      pts.push_back(it == h.end() ? p : it->second);
    }
    out.set_points(std::move(pts));
  }
  return out;
}

bool operator==(const instance& a, const instance& b) {
  return a.schema_ == b.schema_ && a.domain_ == b.domain_ && a.facts_ == b.facts_ && a.pointed_ == b.pointed_ &&
         a.points_ == b.points_;
}

instance unite(const instance& a, const instance& b) {
  instance out(merge_schemas(a.sch(), b.sch()));
  for (const auto& e : a.domain()) out.add_element(e);
  for (const auto& e : b.domain()) out.add_element(e);
  for (const auto& f : a.facts()) out.add_fact(f);
  for (const auto& f : b.facts()) out.add_fact(f);
  if (a.pointed()) out.set_points(a.points());
  return out;
}

}  // namespace homkit
