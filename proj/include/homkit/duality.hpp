#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homkit/adjoint.hpp"
#include "homkit/chase.hpp"
#include "homkit/model.hpp"
#include "homkit/oracle.hpp"

namespace homkit {

enum class duality_category { plain, relative, abox };

struct duality {
  std::vector<instance> frontier;
  std::optional<frontier_generator> generator;
  std::vector<instance> duals;
  std::optional<tgd_set> theory;
  duality_category category = duality_category::plain;
  std::size_t arity = 0;
  bool verified = false;  // set only by verify()
};

struct dual_options {
  adjoint_options adjoint;
  bool minimize = false;
  // Core reduction is skipped for duals with more elements than this.
  std::size_t minimize_cap = 64;
  // Element names of the target instance J: b1..bk and c.
  std::string b_prefix = "b";
  std::string c_name = "c";
};

// Plain dual set for F (pointed instances, k points each).
using dual_provider = std::function<std::vector<instance>(const std::vector<instance>& f, std::size_t k)>;

// Duals of Unfoldings(P, R) via the adjoint of restrict_output(P, R).
duality dual_from_program(const program& p, const std::string& r, const dual_options& opts = {});

// One non-recursive rule per member: head r(points), body the member's facts.
program frontier_program(const std::vector<instance>& f, std::size_t k, const std::string& r = "R");

// Provider backed by frontier_program + dual_from_program (acyclic members only).
dual_provider builtin_provider(const dual_options& opts = {});

struct theory_options {
  dual_options dual;
  // Program equivalent to tgd_compile(sigma) that admits an adjoint, over the
  // same in_name/out_name relations; defaults to tgd_compile(sigma) itself.
  std::optional<pipeline> rewrite;
  dual_provider provider;  // empty = builtin_provider(dual)
};

// Duality relative to the models of sigma; frontier = chased F_spec members.
duality dual_wrt_theory(const tgd_set& sigma, const std::vector<instance>& f_spec, const theory_options& opts = {});
// Duality in the ABox category of sigma: duals are adjoint members, unchased.
duality abox_dual(const tgd_set& sigma, const std::vector<instance>& f, const theory_options& opts = {});

// P_Sigma(a) over the schema of sigma; bounded at `depth` rounds when the
// compiled program is not weakly acyclic.
chase_result theory_chase(const tgd_set& sigma, const instance& a, std::size_t depth = 8);

// Whether h extends to a homomorphism P_Sigma(a) -> P_Sigma(b).
tri abox_morphism(const tgd_set& sigma, const instance& a, const instance& b, const element_map& h = {},
                  std::size_t depth = 4);

// Pointed core by element-removal retract search.
instance core_of(const instance& a);

// Bounded check; plain/relative go through verify_duality, abox decides
// arrows with abox_morphism. Sets d.verified on a clean pass.
verdict verify(duality& d, std::size_t bound);

}  // namespace homkit
