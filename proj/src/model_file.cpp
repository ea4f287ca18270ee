#include "mdpr/model_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mdpr {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::InputError, what); }

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  return j.get<double>();
}

std::string string_at(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where + ": expected a string");
  return j.get<std::string>();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing key \"" + key + "\"");
  return *it;
}

InventorySpec parse_inventory(const json& j, bool& terminate) {
  const std::string w = "inventory";
  if (!j.is_object()) fail(w + ": expected an object");
  InventorySpec s;
  s.capacity = number_at(require(j, "capacity", w), w + ".capacity");
  s.max_order = number_at(require(j, "max_order", w), w + ".max_order");
  s.grid_step = j.contains("grid_step") ? number_at(j["grid_step"], w + ".grid_step") : 1.0;
  s.fixed_cost = number_at(require(j, "fixed_cost", w), w + ".fixed_cost");
  s.unit_cost = number_at(require(j, "unit_cost", w), w + ".unit_cost");
  const json& pmf = require(j, "demand_pmf", w);
  if (!pmf.is_array()) fail(w + ".demand_pmf: expected a list of [demand, probability]");
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const std::string wi = w + ".demand_pmf[" + std::to_string(i) + "]";
    if (!pmf[i].is_array() || pmf[i].size() != 2) fail(wi + ": expected [demand, probability]");
    s.demand_pmf.emplace_back(number_at(pmf[i][0], wi), number_at(pmf[i][1], wi));
  }
  const json& h = require(j, "holding", w);
  if (h.is_number()) {
    if (!(s.grid_step > 0.0)) fail(w + ".grid_step must be > 0");
    const auto levels = static_cast<std::size_t>(std::llround(s.capacity / s.grid_step)) + 1;
    for (std::size_t i = 0; i < levels; ++i) {
      s.holding.push_back(h.get<double>() * static_cast<double>(i) * s.grid_step);
    }
  } else if (h.is_array()) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      s.holding.push_back(number_at(h[i], w + ".holding[" + std::to_string(i) + "]"));
    }
  } else {
    fail(w + ".holding: expected a number or a list");
  }
  terminate = false;
  if (j.contains("terminate_on_lost_sale")) {
    if (!j["terminate_on_lost_sale"].is_boolean()) fail(w + ".terminate_on_lost_sale: expected a boolean");
    terminate = j["terminate_on_lost_sale"].get<bool>();
  }
  s.validate();
  return s;
}

Remark1Spec parse_remark1(const json& j) {
  const std::string w = "remark1";
  if (!j.is_object()) fail(w + ": expected an object");
  Remark1Spec s;
  const json& grid = require(j, "grid", w);
  if (!grid.is_array()) fail(w + ".grid: expected a list of numbers");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s.interior_grid.push_back(number_at(grid[i], w + ".grid[" + std::to_string(i) + "]"));
  }
  if (j.contains("cost")) s.cost = number_at(j["cost"], w + ".cost");
  s.validate();
  return s;
}

FiniteMdp parse_explicit(const json& doc) {
  const json& states = require(doc, "states", "model");
  if (!states.is_array() || states.empty()) fail("states: expected a nonempty list of labels");
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto l = string_at(states[i], "states[" + std::to_string(i) + "]");
    if (!index.emplace(l, i).second) fail("states: duplicate label '" + l + "'");
    labels.push_back(std::move(l));
  }

  const json& actions = require(doc, "actions", "model");
  if (!actions.is_object()) fail("actions: expected a map from state label to action labels");
  std::vector<std::vector<ActionRow>> rows(labels.size());
  std::vector<std::map<std::string, std::size_t>> action_index(labels.size());
  for (const auto& [key, list] : actions.items()) {
    const auto it = index.find(key);
    if (it == index.end()) fail("actions: unknown state '" + key + "'");
    if (!list.is_array()) fail("actions." + key + ": expected a list of labels");
    for (std::size_t k = 0; k < list.size(); ++k) {
      auto a = string_at(list[k], "actions." + key + "[" + std::to_string(k) + "]");
      if (!action_index[it->second].emplace(a, k).second) {
        fail("actions." + key + ": duplicate action '" + a + "'");
      }
      rows[it->second].push_back(ActionRow{std::move(a), {}, 0.0});
    }
  }

  auto resolve = [&](const json& s, const json& a, const std::string& where) {
    const auto sl = string_at(s, where);
    const auto si = index.find(sl);
    if (si == index.end()) fail(where + ": unknown state '" + sl + "'");
    const auto al = string_at(a, where);
    const auto ai = action_index[si->second].find(al);
    if (ai == action_index[si->second].end()) {
      fail(where + ": unknown action '" + al + "' at state '" + sl + "'");
    }
    return std::pair{si->second, ai->second};
  };

  if (doc.contains("kernel")) {
    const json& kernel = doc["kernel"];
    if (!kernel.is_array()) fail("kernel: expected a list of [state, action, target, mass]");
    for (std::size_t i = 0; i < kernel.size(); ++i) {
      const std::string where = "kernel[" + std::to_string(i) + "]";
      const json& e = kernel[i];
      if (!e.is_array() || e.size() != 4) fail(where + ": expected [state, action, target, mass]");
      const auto [x, a] = resolve(e[0], e[1], where);
      const auto tl = string_at(e[2], where);
      const auto ti = index.find(tl);
      if (ti == index.end()) fail(where + ": unknown state '" + tl + "'");
      rows[x][a].kernel.push_back({ti->second, number_at(e[3], where)});
    }
  }

  const json& cost = require(doc, "cost", "model");
  if (!cost.is_array()) fail("cost: expected a list of [state, action, value]");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < cost.size(); ++i) {
    const std::string where = "cost[" + std::to_string(i) + "]";
    const json& e = cost[i];
    if (!e.is_array() || e.size() != 3) fail(where + ": expected [state, action, value]");
    const auto [x, a] = resolve(e[0], e[1], where);
    if (!seen.emplace(x, a).second) fail(where + ": duplicate cost entry");
    rows[x][a].cost = number_at(e[2], where);
  }
  for (std::size_t x = 0; x < rows.size(); ++x) {
    for (std::size_t a = 0; a < rows[x].size(); ++a) {
      if (!seen.count({x, a})) {
        fail("cost: missing entry for state '" + labels[x] + "', action '" + rows[x][a].label + "'");
      }
    }
  }
  return FiniteMdp(std::move(labels), std::move(rows));
}

}  // namespace

ModelDocument parse_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, json_text.size());
    const auto line = 1 + std::count(json_text.begin(), json_text.begin() + static_cast<long>(upto), '\n');
    fail("malformed model document (line " + std::to_string(line) + "): " + e.what());
  }
  if (!doc.is_object()) fail("model document must be a JSON object");

  ModelDocument out;
  const bool has_inv = doc.contains("inventory");
  const bool has_r1 = doc.contains("remark1");
  const bool has_explicit = doc.contains("states") || doc.contains("actions") ||
                            doc.contains("kernel") || doc.contains("cost");
  if (has_inv + has_r1 + has_explicit > 1) {
    fail("generator blocks and explicit lists are mutually exclusive");
  }
  if (has_inv) {
    out.inventory = parse_inventory(doc["inventory"], out.terminate_on_lost_sale);
    out.mdp = out.terminate_on_lost_sale ? build_lost_sale_total_cost_mdp(*out.inventory)
                                         : build_inventory_mdp(*out.inventory);
    out.ell = kLostSaleLabel;
  } else if (has_r1) {
    out.remark1 = parse_remark1(doc["remark1"]);
    out.mdp = build_remark1_mdp(*out.remark1);
    out.ell = kRemark1EllLabel;
  } else {
    try {
      out.mdp = parse_explicit(doc);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InputError) throw;
      fail(e.what());
    }
  }

  if (doc.contains("ell")) {
    out.ell = string_at(doc["ell"], "ell");
    if (!out.mdp.find_state(*out.ell)) fail("ell: unknown state '" + *out.ell + "'");
  }
  if (doc.contains("V")) {
    const json& v = doc["V"];
    if (!v.is_object()) fail("V: expected a map from state label to value");
    WeightFunction w = WeightFunction::ones(out.mdp.num_states());
    for (const auto& [key, val] : v.items()) {
      const auto x = out.mdp.find_state(key);
      if (!x) fail("V: unknown state '" + key + "'");
      const double d = number_at(val, "V." + key);
      if (!(d >= 1.0) || !std::isfinite(d)) fail("V." + key + ": must be finite and >= 1");
      w.values[*x] = d;
    }
    out.v = std::move(w);
  }

  const auto diag = validate_model(out.mdp);
  if (!diag.valid()) {
    const auto& v = diag.violations.front();
    std::string where = "state '" + out.mdp.state_label(v.state) + "'";
    if (v.action) where += ", action '" + out.mdp.row(v.state, *v.action).label + "'";
    fail("invalid model at " + where + ": " + v.message);
  }
  return out;
}

ModelDocument load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string write_model(const ModelDocument& d) {
  const FiniteMdp& m = d.mdp;
  nlohmann::ordered_json j;
  j["states"] = m.state_labels();
  nlohmann::ordered_json actions = nlohmann::ordered_json::object();
  nlohmann::ordered_json kernel = nlohmann::ordered_json::array();
  nlohmann::ordered_json cost = nlohmann::ordered_json::array();
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    auto& list = actions[m.state_label(x)] = nlohmann::ordered_json::array();
    for (const auto& r : m.actions(x)) {
      list.push_back(r.label);
      for (const auto& t : r.kernel) {
        kernel.push_back({m.state_label(x), r.label, m.state_label(t.target), t.mass});
      }
      cost.push_back({m.state_label(x), r.label, r.cost});
    }
  }
  j["actions"] = std::move(actions);
  j["kernel"] = std::move(kernel);
  j["cost"] = std::move(cost);
  if (d.v) {
    nlohmann::ordered_json v = nlohmann::ordered_json::object();
    for (std::size_t x = 0; x < m.num_states(); ++x) v[m.state_label(x)] = d.v->values[x];
    j["V"] = std::move(v);
  }
  if (d.ell) j["ell"] = *d.ell;
  return j.dump(2) + "\n";
}

}  // namespace mdpr
