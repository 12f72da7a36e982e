#pragma once

// Instance JSON and CSV serialization.
//
// Instance JSON:
//   {"pools": [{"kind": "constant_product", "reserve_x": 100, "reserve_y": 100},
//              {"kind": "constant_sum", "rate": 1.0, "reserve_y": 50}],
//    "amount_in": 100,
//    "epsilon": 1e-10,               optional
//    "max_rounds": 100000,           optional
//    "init": "all_to_best" | {"marginal_greedy": 1000}}   optional

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "onehop/amm.hpp"
#include "onehop/diagnostics.hpp"
#include "onehop/solver.hpp"

namespace onehop {

struct Instance {
  std::vector<Pool> pools;
  double amount_in = 0.0;
  std::optional<double> epsilon;
  std::optional<std::int64_t> max_rounds;
  std::optional<InitStrategy> init;

  SolverConfig<double> config() const;
};

/// Malformed or invalid input. what() names the offending field or the
/// parse position.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Pool pool_from_json(const nlohmann::json& j, const std::string& where = "pool");
nlohmann::json pool_to_json(const Pool& pool);

InitStrategy init_from_json(const nlohmann::json& j);
nlohmann::json init_to_json(const InitStrategy& init);

/// "all_to_best", "marginal_greedy:N" or "greedy:N".
InitStrategy parse_init(const std::string& text);
std::string to_string(const InitStrategy& init);

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& inst);

Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);

/// %.17g formatting so CSV values round-trip exactly.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const Trace& trace);
void write_bounds_csv(std::ostream& out, const BoundReport& report);

}  // namespace onehop
