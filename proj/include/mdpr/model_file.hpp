#pragma once

// JSON model files.
//
//   {
//     "states":  ["s0", "s1"],
//     "actions": {"s0": ["a0"], "s1": ["a0"]},
//     "kernel":  [["s0", "a0", "s1", 0.5], ["s1", "a0", "s1", 0.4]],
//     "cost":    [["s0", "a0", 1.0], ["s1", "a0", 2.0]],
//     "V":       {"s0": 1.0, "s1": 1.0},      optional
//     "ell":     "s1"                          optional
//   }
//
// Instead of the explicit lists a file may hold exactly one generator block:
//
//   "inventory": {"capacity": 4, "max_order": 2, "grid_step": 1,
//                 "demand_pmf": [[0, 0.3], [1, 0.3], [2, 0.2], [3, 0.2]],
//                 "fixed_cost": 5, "unit_cost": 1,
//                 "holding": [0, 0.5, 1, 1.5, 2]  (or a number: linear rate),
//                 "terminate_on_lost_sale": false}
//   "remark1":   {"grid": [0.2, 0.4, 0.6], "cost": 1}

#include <optional>
#include <string>

#include "mdpr/bounding.hpp"
#include "mdpr/core.hpp"
#include "mdpr/models.hpp"

namespace mdpr {

struct ModelDocument {
  FiniteMdp mdp;
  std::optional<WeightFunction> v;
  std::optional<std::string> ell;
  std::optional<InventorySpec> inventory;
  bool terminate_on_lost_sale = false;
  std::optional<Remark1Spec> remark1;
};

/// Parses and validates (validate_model) a model document. Errors are
/// Error(InputError) naming the offending key, label, or line.
ModelDocument parse_model(const std::string& json_text);
ModelDocument load_model(const std::string& path);

/// Explicit-list form of the document (generators already expanded).
/// parse_model(write_model(d)).mdp == d.mdp.
std::string write_model(const ModelDocument& doc);

}  // namespace mdpr
