#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "homkit/core.hpp"

namespace homkit {

struct atom {
  std::string rel;
  std::vector<std::string> args;

  friend bool operator==(const atom& a, const atom& b) { return a.rel == b.rel && a.args == b.args; }
  friend bool operator<(const atom& a, const atom& b) {
    return a.rel != b.rel ? a.rel < b.rel : a.args < b.args;
  }
};

struct rule {
  std::vector<atom> head;
  std::vector<std::string> existentials;
  std::vector<atom> body;

  bool existential() const { return !existentials.empty(); }
  std::set<std::string> body_vars() const;
  std::set<std::string> head_vars() const;
  // Variables occurring in both head and body.
  std::vector<std::string> exported() const;

  friend bool operator==(const rule& a, const rule& b) {
    return a.head == b.head && a.existentials == b.existentials && a.body == b.body;
  }
};

// aux relation -> 1-based articulation position; missing key = undefined.
using articulation_map = std::map<std::string, std::size_t>;

struct program {
  schema in;
  schema out;
  schema aux;
  std::vector<rule> rules;
  articulation_map articulation;

  schema full_schema() const;
  bool is_datalog() const;
  // Throws on disjointness, arity, placement or safety violations.
  void validate() const;

  friend bool operator==(const program& a, const program& b) {
    return a.in == b.in && a.out == b.out && a.aux == b.aux && a.rules == b.rules && a.articulation == b.articulation;
  }
};

struct tgd {
  std::vector<atom> body;
  std::vector<std::string> existentials;
  std::vector<atom> head;

  friend bool operator==(const tgd& a, const tgd& b) {
    return a.body == b.body && a.existentials == b.existentials && a.head == b.head;
  }
};

struct tgd_set {
  schema sch;
  std::vector<tgd> deps;

  void validate() const;
  friend bool operator==(const tgd_set& a, const tgd_set& b) { return a.sch == b.sch && a.deps == b.deps; }
};

struct cq {
  std::vector<std::string> answer;
  std::vector<atom> body;

  friend bool operator==(const cq& a, const cq& b) { return a.answer == b.answer && a.body == b.body; }
};

struct ucq {
  std::string name = "q";
  std::size_t arity = 0;
  schema sch;
  std::vector<cq> disjuncts;

  void validate() const;
  friend bool operator==(const ucq& a, const ucq& b) {
    return a.name == b.name && a.arity == b.arity && a.sch == b.sch && a.disjuncts == b.disjuncts;
  }
};

std::set<std::string> vars_of(const std::vector<atom>& atoms);
schema schema_of(const std::vector<atom>& atoms);

// Variables become named elements; points are given by variable names.
instance canonical_instance(const std::vector<atom>& atoms, const schema& s, const std::vector<std::string>& points = {});
// Body of a single-head Datalog rule pointed by the head arguments.
instance canonical_instance(const rule& r, const schema& s);
instance canonical_instance(const cq& q, const schema& s);

// Inverse of canonical_instance: elements become variables (their keys, with
// reserved characters replaced).
cq instance_to_cq(const instance& a);

std::string to_string(const atom& a);
std::string to_string(const rule& r);
std::string to_string(const tgd& t);
std::string to_string(const cq& q);

}  // namespace homkit
