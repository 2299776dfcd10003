#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "homkit/core.hpp"
#include "homkit/model.hpp"

namespace homkit {

using json = nlohmann::json;

program parse_program(std::string_view text);
instance parse_instance(std::string_view text);
tgd_set parse_tgds(std::string_view text);
ucq parse_query(std::string_view text);

std::string print_program(const program& p);
std::string print_instance(const instance& a);
std::string print_tgds(const tgd_set& s);
std::string print_query(const ucq& q);

// Parses a single element token such as `a`, `_bot`, `_n3` or a pair.
element parse_element(std::string_view text);

std::string schema_string(const schema& s);

json to_json(const schema& s);
json to_json(const instance& a);
json to_json(const program& p);
json to_json(const tgd_set& s);
json to_json(const ucq& q);
json to_json(const element_map& h);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace homkit
