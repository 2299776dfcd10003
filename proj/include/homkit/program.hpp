#pragma once

#include <optional>
#include <string>
#include <vector>

#include "homkit/model.hpp"
#include "homkit/syntax.hpp"

namespace homkit {

struct classification {
  bool tree_shaped = false;
  bool almost_monadic = false;
  bool tam = false;
  bool simple = false;
  bool connected = false;
  bool monadic = false;
  bool strongly_linear = false;
  bool weakly_acyclic = false;
  bool non_recursive = false;
  bool boolean_program = false;
  std::optional<articulation_map> witness;
};

classification classify(const program& p);
// Searches articulation functions (declared positions are kept fixed).
std::optional<articulation_map> find_articulation(const program& p);
bool is_tree_shaped(const program& p);
bool is_weakly_acyclic(const program& p);
json to_json(const classification& c);

program to_simple_tam(const program& p);
program monadic_reduction(const program& p, const std::string& r);
// q_names are the unary input relations Q1..Qk of p; out_name is the k-ary output.
program monadic_to_tam(const program& p, const std::vector<std::string>& q_names, const std::string& out_name = "R");
std::vector<instance> unfoldings(const program& p, const std::string& r, int depth);
program restrict_output(const program& p, const std::string& r);

std::string in_name(const std::string& rel);
std::string out_name(const std::string& rel);
program tgd_compile(const tgd_set& sigma);
program pultr_compile(const cq& phi_v, const cq& phi_e);

}  // namespace homkit
