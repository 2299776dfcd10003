#pragma once

#include <functional>
#include <vector>

#include "homkit/chase.hpp"
#include "homkit/core.hpp"
#include "homkit/model.hpp"

namespace homkit {

struct adjoint_member {
  instance j_prime;
  element_map iota;  // partial: missing key = undefined
};

struct adjoint_result {
  instance source;
  std::vector<adjoint_member> members;
};

struct adjoint_options {
  // Upper bound on enumerated candidate facts.
  std::size_t cap = 1000000;
  // Drop members that map into another member (result stays an adjoint).
  bool prune_dominated = true;
};

using adjoint_fn = std::function<adjoint_result(const instance&)>;

adjoint_result tam_adjoint(const program& p, const instance& j, const adjoint_options& opts = {});
adjoint_result sl_adjoint(const program& p, const instance& j);

// Members (J'', kappa . iota) for (J', iota) in outer, (J'', kappa) in inner(J').
// `link` renames J' relations before inner is applied.
adjoint_result compose_adjoints(const adjoint_result& outer, const adjoint_fn& inner,
                                const std::map<std::string, std::string>& link = {});

enum class adjoint_method { automatic, tam, sl };

// Adjoint of a single program, choosing a construction by classification.
adjoint_fn adjoint_for(const program& p, adjoint_method m = adjoint_method::automatic, const adjoint_options& opts = {});
// Adjoint of a pipeline: last stage first, then composed backwards.
adjoint_fn adjoint_for(const pipeline& pl, const adjoint_options& opts = {});

}  // namespace homkit
