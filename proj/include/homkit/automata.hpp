#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homkit/model.hpp"

namespace homkit {

// Leaf: rel empty, `labels` the set S. Internal: rel R, 1-based index i,
// one child per position of R.
struct tree_term {
  std::set<std::string> labels;
  std::string rel;
  std::size_t index = 0;
  std::vector<tree_term> children;

  bool is_leaf() const { return rel.empty(); }
  static tree_term leaf(std::set<std::string> s) { return tree_term{std::move(s), {}, 0, {}}; }
  static tree_term down(std::string r, std::size_t i, std::vector<tree_term> ts) {
    return tree_term{{}, std::move(r), i, std::move(ts)};
  }
  std::size_t depth() const;

  friend bool operator==(const tree_term& a, const tree_term& b) {
    return a.labels == b.labels && a.rel == b.rel && a.index == b.index && a.children == b.children;
  }
};

std::string to_string(const tree_term& t);

// Elements v1, v2, ... in preorder; schema is the term's relations plus the
// given one.
instance term_to_tree(const tree_term& t, const schema& s = {});
// `labels` names the unary relations read as leaf labels.
tree_term tree_to_term(const instance& a, const std::set<std::string>& labels);

struct tree_automaton {
  using op = std::pair<std::string, std::size_t>;  // (R, i)
  using transition = std::pair<std::vector<std::string>, std::string>;

  schema sch;
  std::set<std::string> labels;
  std::set<std::string> states;
  std::set<std::string> accept;
  // Leaf operator S -> target states. Missing S means no transition.
  std::map<std::set<std::string>, std::set<std::string>> leaf;
  std::map<op, std::set<transition>> trans;

  // Throws on unknown states, relations or labels and on arity mismatches.
  void validate() const;
  schema full_schema() const;
};

// Set of states reachable at the root.
std::set<std::string> run_states(const tree_automaton& a, const tree_term& t);
bool run(const tree_automaton& a, const tree_term& t);

tree_automaton automaton_union(const tree_automaton& a, const tree_automaton& b);
// Subset construction over reachable subsets; cap_exceeded past `cap` states.
tree_automaton complement(const tree_automaton& a, std::size_t cap = 1u << 16);
tree_automaton project(const tree_automaton& a, const std::set<std::string>& keep);

// States E_q per state, Boolean output Ans (renamed when taken).
program automaton_to_datalog(const tree_automaton& a);

// All terms of depth <= d over the automaton's signature (depth 0 = leaves).
std::vector<tree_term> enumerate_terms(const schema& s, const std::set<std::string>& labels, std::size_t depth,
                                       std::size_t cap = 1u << 20);

tree_automaton parse_automaton(std::string_view text);
std::string print_automaton(const tree_automaton& a);

}  // namespace homkit
