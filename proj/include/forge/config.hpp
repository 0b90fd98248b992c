#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace forge {

enum class UtilityMode {
  Sum,      // sum of per-program cost reductions
  MinTask,  // each task contributes only its cheapest program after rewriting
};

struct SearchConfig {
  int max_arity = 3;
  UtilityMode mode = UtilityMode::Sum;
  bool opt_upper_bound = true;
  bool opt_arg_capture = true;
  bool opt_redundant_args = true;
  bool opt_single_task_prune = true;
  int workers = 1;
  std::optional<std::uint64_t> node_budget;
  std::optional<double> time_budget_s;
  /// Name of the primitive the abstraction will be introduced as; its cost
  /// enters the utility.
  std::string abstraction_name = "fn_0";
};

}  // namespace forge
