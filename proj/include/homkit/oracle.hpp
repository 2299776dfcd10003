#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homkit/adjoint.hpp"
#include "homkit/chase.hpp"
#include "homkit/core.hpp"
#include "homkit/model.hpp"
#include "homkit/syntax.hpp"

namespace homkit {

struct verdict {
  bool pass = true;
  bool unknown = false;
  std::optional<instance> counterexample;
  std::string explanation;
  std::size_t bound = 0;
  std::size_t checked = 0;
};

json to_json(const verdict& v);

// Worker threads used by the oracle (0 = hardware concurrency).
void set_oracle_jobs(std::size_t n);
std::size_t oracle_jobs();

struct enum_options {
  const tgd_set* theory = nullptr;  // keep only models of the theory
  bool dedupe_iso = false;
};

// Elements e1..em for m = 0..max_domain, then every fact subset in bitmask
// order over the canonical candidate-fact list.
std::vector<instance> enumerate_instances(const schema& s, std::size_t max_domain, const enum_options& opts = {});
void for_each_instance(const schema& s, std::size_t max_domain, const std::function<bool(const instance&)>& visit,
                       const enum_options& opts = {});

// Number of candidate facts over m elements.
std::size_t candidate_fact_count(const schema& s, std::size_t m);

// Smallest failing instance (domain size, fact count, text) over all
// instances with at most `bound` elements; `check` returns a failure
// (possibly a pointed variant of its argument) with an explanation.
using instance_check = std::function<std::optional<std::pair<instance, std::string>>(const instance&)>;
verdict search_counterexample(const schema& s, std::size_t bound, const instance_check& check,
                              const enum_options& opts = {});

// Frontier given by a program and output relation: (C,c) is above it iff R(c) in P(C).
struct frontier_generator {
  program prog;
  std::string rel;
};

struct duality_spec {
  std::vector<instance> frontier;
  std::optional<frontier_generator> generator;
  std::vector<instance> duals;
  const tgd_set* theory = nullptr;
  std::size_t arity = 0;
};

verdict verify_duality(const duality_spec& d, std::size_t bound);

// Exact when P(I) is finite; otherwise decided on chase prefixes of depth
// d and 2d, `unknown` only if they disagree in a way that cannot be settled.
enum class tri { no, yes, unknown };
tri output_maps_to(const pipeline& pl, const instance& i, const instance& j, const element_map& bindings = {},
                   std::size_t depth = 4);

verdict verify_adjoint(const pipeline& pl, const instance& j, const adjoint_result& res, std::size_t bound);

verdict programs_equivalent_bounded(const pipeline& p1, const pipeline& p2, std::size_t bound);

}  // namespace homkit
