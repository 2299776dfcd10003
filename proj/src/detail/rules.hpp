#pragma once

#include <set>
#include <string>
#include <vector>

#include "homkit/model.hpp"

namespace homkit::detail {

// Fresh identifiers `<prefix><n>` avoiding a growing set of used names.
class fresh_names {
 public:
  explicit fresh_names(std::set<std::string> used = {}) : used_(std::move(used)) {}
  void reserve(const std::string& s) { used_.insert(s); }
  bool taken(const std::string& s) const { return used_.count(s) != 0; }
  std::string next(const std::string& prefix) {
    std::string s;
    do s = prefix + std::to_string(++counter_[prefix]);
    while (used_.count(s));
    used_.insert(s);
    return s;
  }
  // `base` itself when free, else the first free `base<n>`.
  std::string claim(const std::string& base) {
    if (!used_.count(base)) {
      used_.insert(base);
      return base;
    }
    return next(base);
  }

 private:
  std::set<std::string> used_;
  std::map<std::string, int> counter_;
};

std::set<std::string> program_vars(const program& p);
std::set<std::string> relation_names(const program& p);

// For every variable in `needed` missing from the body, adds one atom over a
// positive-arity relation of `s_in` holding it (fresh variables elsewhere);
// returns all combinations in canonical order.
std::vector<rule> safe_extensions(const rule& r, const std::set<std::string>& needed, const schema& s_in,
                                  fresh_names& vars);

}  // namespace homkit::detail
