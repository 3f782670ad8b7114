#include "infocouple/json_io.hpp"

#include <fstream>
#include <string>

#include "infocouple/errors.hpp"

namespace infocouple {

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw ValidationError("expected a JSON object with field '" + std::string(name) + "'");
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError("missing field '" + std::string(name) + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError("field '" + where + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError("field '" + where + "' must be an integer");
  return j.get<int>();
}

std::vector<double> number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError("field '" + where + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

mdp::Cell cell(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("field '" + where + "' must be [row, col]");
  return mdp::Cell{integer(j[0], where + "[0]"), integer(j[1], where + "[1]")};
}

json cell_json(mdp::Cell c) { return json::array({c.row, c.col}); }

}  // namespace

json to_json(const Distribution& d) { return json{{"probs", d.vector()}}; }

json to_json(const Coupling& c) { return json{{"table", c.to_rows()}}; }

json to_json(const mdp::GridLayout& g) {
  json obstacles = json::array();
  for (const auto& c : g.obstacles) obstacles.push_back(cell_json(c));
  return json{{"width", g.width},       {"height", g.height}, {"start", cell_json(g.start)},
              {"goal", cell_json(g.goal)}, {"trap", cell_json(g.trap)}, {"obstacles", obstacles},
              {"noise", g.noise},       {"gamma", g.gamma},   {"step_cap", g.step_cap}};
}

json to_json(const mdp::Policy& p, const mdp::GridLayout& g) {
  return json{{"beta", p.beta}, {"width", g.width}, {"height", g.height}, {"q", p.q}, {"probs", p.probs}};
}

Distribution distribution_from_json(const json& j) {
  try {
    return Distribution(number_array(field(j, "probs"), "probs"));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("probs: ") + e.what());
  }
}

Coupling coupling_from_json(const json& j) {
  const json& table = field(j, "table");
  if (!table.is_array()) throw ValidationError("field 'table' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < table.size(); ++r) rows.push_back(number_array(table[r], "table[" + std::to_string(r) + "]"));
  try {
    return Coupling::from_rows(rows);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("table: ") + e.what());
  }
}

mdp::GridLayout layout_from_json(const json& j) {
  mdp::GridLayout g;
  g.width = integer(field(j, "width"), "width");
  g.height = integer(field(j, "height"), "height");
  g.start = cell(field(j, "start"), "start");
  g.goal = cell(field(j, "goal"), "goal");
  g.trap = cell(field(j, "trap"), "trap");
  g.obstacles.clear();
  if (j.contains("obstacles")) {
    const json& obs = j["obstacles"];
    if (!obs.is_array()) throw ValidationError("field 'obstacles' must be an array");
    for (std::size_t i = 0; i < obs.size(); ++i) g.obstacles.push_back(cell(obs[i], "obstacles[" + std::to_string(i) + "]"));
  }
  g.noise = number(field(j, "noise"), "noise");
  g.gamma = number(field(j, "gamma"), "gamma");
  if (j.contains("step_cap")) {
    const int cap = integer(j["step_cap"], "step_cap");
    if (cap <= 0) throw ValidationError("field 'step_cap' must be positive");
    g.step_cap = static_cast<std::size_t>(cap);
  }
  return g;
}

mdp::Policy policy_from_json(const json& j) {
  mdp::Policy p;
  p.beta = number(field(j, "beta"), "beta");
  auto read_table = [&](const char* name) {
    const json& t = field(j, name);
    if (!t.is_array()) throw ValidationError("field '" + std::string(name) + "' must be an array");
    std::vector<std::array<double, mdp::kNumActions>> out;
    for (std::size_t s = 0; s < t.size(); ++s) {
      const std::string where = std::string(name) + "[" + std::to_string(s) + "]";
      const auto row = number_array(t[s], where);
      if (row.size() != mdp::kNumActions) throw ValidationError("field '" + where + "' must have 4 entries");
      std::array<double, mdp::kNumActions> a{};
      std::copy(row.begin(), row.end(), a.begin());
      out.push_back(a);
    }
    return out;
  };
  p.q = read_table("q");
  p.probs = read_table("probs");
  if (p.q.size() != p.probs.size()) throw ValidationError("fields 'q' and 'probs' differ in length");
  for (std::size_t s = 0; s < p.probs.size(); ++s) {
    try {
      (void)p.action_dist(s);
    } catch (const ValidationError& e) {
      throw ValidationError("probs[" + std::to_string(s) + "]: " + e.what());
    }
  }
  return p;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace infocouple
