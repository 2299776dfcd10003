#pragma once

#include <optional>
#include <set>
#include <vector>

#include "homkit/duality.hpp"
#include "homkit/model.hpp"
#include "homkit/oracle.hpp"

namespace homkit {

using answer_set = std::set<std::vector<element>>;

answer_set evaluate(const ucq& q, const instance& a);
// Whether the tuple is an answer (one pointed homomorphism test per disjunct).
bool holds(const ucq& q, const instance& a, const std::vector<element>& tuple);

// One pointed canonical instance per disjunct.
std::vector<instance> canonical_instances(const ucq& q);
bool is_c_acyclic(const ucq& q);

enum class example_mode { model, abox };

struct example_set {
  std::vector<instance> positives;
  std::vector<instance> negatives;
  example_mode mode = example_mode::model;
  std::optional<tgd_set> theory;
  std::size_t arity = 0;
};

// Model mode: positives are chased canonical instances, negatives the duals
// relative to sigma.
example_set characterize(const ucq& q, const tgd_set& sigma, const theory_options& opts = {});
// ABox mode: positives are the canonical instances, negatives abox duals.
example_set characterize_abox(const ucq& q, const tgd_set& sigma, const theory_options& opts = {});

// Abox mode evaluates on chases; non-terminating chases are deepened until the
// answer is stable for two consecutive depths (cap_exceeded past max_depth).
bool fits(const ucq& q, const example_set& ex, std::size_t max_depth = 64);

// fits(q, ex) and (positives, negatives) is a duality up to `bound` elements.
verdict verify_characterization(const ucq& q, const example_set& ex, std::size_t bound);

json to_json(const example_set& ex);

}  // namespace homkit
