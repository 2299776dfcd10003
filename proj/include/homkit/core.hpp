#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "homkit/error.hpp"

namespace homkit {

// relation name -> arity
using schema = std::map<std::string, std::size_t>;

schema merge_schemas(const schema& a, const schema& b);

struct fact;

enum class element_kind { named, null, bottom, pair };

// Values are immutable and shared; ordering and equality follow the canonical
// serialization (key()).
class element {
 public:
  element();  // bottom
  static element named(std::string name);
  static element null(std::uint64_t serial);
  static element bottom();
  static element pair(const element& first, std::vector<fact> facts);

  element_kind kind() const;
  const std::string& name() const;
  std::uint64_t serial() const;
  const element& first() const;
  const std::vector<fact>& pair_facts() const;

  const std::string& key() const;
  std::size_t hash() const;

  friend bool operator==(const element& a, const element& b);
  friend bool operator<(const element& a, const element& b);
  friend bool operator!=(const element& a, const element& b) { return !(a == b); }

  struct node;

 private:
  explicit element(std::shared_ptr<const node> n) : n_(std::move(n)) {}
  std::shared_ptr<const node> n_;
};

struct fact {
  std::string rel;
  std::vector<element> args;

  std::string key() const;
  friend bool operator==(const fact& a, const fact& b) { return a.rel == b.rel && a.args == b.args; }
  friend bool operator<(const fact& a, const fact& b);
};

using element_map = std::map<element, element>;

fact apply(const element_map& h, const fact& f);

class instance {
 public:
  instance() = default;
  explicit instance(schema s) : schema_(std::move(s)) {}

  const schema& sch() const { return schema_; }
  const std::set<element>& domain() const { return domain_; }
  const std::set<fact>& facts() const { return facts_; }
  const std::vector<element>& points() const { return points_; }
  bool pointed() const { return pointed_; }

  void add_relation(const std::string& rel, std::size_t arity);
  void add_element(const element& e) { domain_.insert(e); }
  // Adds the fact and its elements to the domain; validates relation and arity.
  void add_fact(const fact& f);
  void add_fact(const std::string& rel, std::vector<element> args) { add_fact(fact{rel, std::move(args)}); }
  void set_points(std::vector<element> pts);
  void clear_points();

  bool contains(const fact& f) const { return facts_.count(f) != 0; }
  std::set<element> active_domain() const;
  std::size_t size() const { return domain_.size(); }

  // Facts restricted to the given relations; domain kept unless shrink is set.
  instance reduct(const schema& keep, bool shrink_domain = false) const;
  // Same facts and points, domain cut to active domain plus points.
  instance trimmed() const;
  instance renamed(const std::map<std::string, std::string>& rel_map) const;
  instance with_points(std::vector<element> pts) const;
  instance image(const element_map& h, const schema& target_schema) const;

  friend bool operator==(const instance& a, const instance& b);
  friend bool operator!=(const instance& a, const instance& b) { return !(a == b); }

 private:
  schema schema_;
  std::set<element> domain_;
  std::set<fact> facts_;
  std::vector<element> points_;
  bool pointed_ = false;
};

// Disjoint-by-name union: both schemas merged, domains and facts united.
instance unite(const instance& a, const instance& b);

struct hom_options {
  // A-element -> B-element bindings; a fixed set is the identity case.
  element_map bindings;
  bool injective = false;
  bool use_points = true;
};

std::optional<element_map> find_homomorphism(const instance& a, const instance& b, const hom_options& opts = {});
std::optional<element_map> find_homomorphism(const instance& a, const instance& b, const std::set<element>& fixed);
// Calls visit for every homomorphism until it returns false.
void for_each_homomorphism(const instance& a, const instance& b, const hom_options& opts,
                           const std::function<bool(const element_map&)>& visit);
bool is_homomorphism(const instance& a, const instance& b, const element_map& h);

bool hom_equivalent(const instance& a, const instance& b, const std::set<element>& fixed = {});
bool isomorphic(const instance& a, const instance& b);

struct structure {
  bool acyclic = true;
  bool connected = true;
  bool c_acyclic = true;
};

structure structure_report(const instance& a);

}  // namespace homkit

template <>
struct std::hash<homkit::element> {
  std::size_t operator()(const homkit::element& e) const noexcept { return e.hash(); }
};
