#pragma once

// JSON forms of the toolkit's data:
//   Distribution  {"probs": [...]}
//   Coupling      {"table": [[...], ...]}
//   GridLayout    {"width":8,"height":8,"start":[r,c],"goal":[r,c],"trap":[r,c],
//                  "obstacles":[[r,c],...],"noise":p,"gamma":0.95,"step_cap":200}
//   Policy        {"beta":b,"width":w,"height":h,"q":[[4 x]...],"probs":[[4 x]...]}
// Parsing errors throw ValidationError naming the offending field.

#include <filesystem>
#include <json.hpp>

#include "infocouple/mdp.hpp"
#include "infocouple/probdist.hpp"

namespace infocouple {

using json = nlohmann::json;

json to_json(const Distribution& d);
json to_json(const Coupling& c);
json to_json(const mdp::GridLayout& g);
json to_json(const mdp::Policy& p, const mdp::GridLayout& g);

Distribution distribution_from_json(const json& j);
Coupling coupling_from_json(const json& j);
mdp::GridLayout layout_from_json(const json& j);
mdp::Policy policy_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace infocouple
