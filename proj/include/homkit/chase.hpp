#pragma once

#include <cstddef>
#include <optional>

#include "homkit/core.hpp"
#include "homkit/model.hpp"

namespace homkit {

struct chase_result {
  instance full;    // over in ∪ out ∪ aux
  instance output;  // out-reduct; domain = input domain plus nulls it mentions
  bool terminated = true;
  // Existential trigger firings (Datalog: derived facts).
  std::size_t steps = 0;
  // Completed rounds of existential firing.
  std::size_t rounds = 0;
};

enum class chase_mode { require_weakly_acyclic, bounded };

struct chase_options {
  chase_mode mode = chase_mode::require_weakly_acyclic;
  // Bounded mode: budget of existential firings. Strict mode: hard cap.
  std::size_t max_steps = 10000;
  // Optional cap on existential rounds (each round fires every active
  // trigger found at its start, after Datalog saturation).
  std::optional<std::size_t> max_rounds;
};

chase_result chase_datalog(const program& p, const instance& i);
chase_result chase_existential(const program& p, const instance& i, const chase_options& opts = {});

// Datalog programs use chase_datalog; weakly acyclic ones the strict chase;
// anything else a round-bounded chase of the given depth.
chase_result chase_any(const program& p, const instance& i, std::size_t depth = 8);

// Input instance over the program's input schema (extra empty relations dropped).
instance as_input(const program& p, const instance& i);

// Sequential composition: stage i+1 reads the output of stage i, with output
// relations renamed through links[i] (identity where absent).
struct pipeline {
  std::vector<program> stages;
  std::vector<std::map<std::string, std::string>> links;

  pipeline() = default;
  pipeline(program p) { stages.push_back(std::move(p)); }  // NOLINT: implicit by design
  schema in() const;
  schema out() const;
};

struct pipeline_result {
  instance output;
  bool terminated = true;
};

// Stages that do not terminate are cut after `depth` existential rounds.
pipeline_result run_pipeline(const pipeline& pl, const instance& i, std::size_t depth = 8);

// I |= Sigma, checked directly on I.
bool satisfies(const instance& i, const tgd_set& sigma);

}  // namespace homkit
