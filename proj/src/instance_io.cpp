#include "onehop/instance_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace onehop {

using nlohmann::json;

namespace {

double positive_number(const json& obj, const char* key, const std::string& where) {
  const std::string field = where + "." + key;
  if (!obj.contains(key)) throw InputError(field + ": missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw InputError(field + ": must be a number");
  const double d = v.get<double>();
  if (!(d > 0.0) || !std::isfinite(d)) throw InputError(field + ": must be a positive finite number, got " + v.dump());
  return d;
}

std::int64_t positive_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw InputError(field + ": must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < 1) throw InputError(field + ": must be at least 1, got " + v.dump());
  return i;
}

}  // namespace

SolverConfig<double> Instance::config() const {
  SolverConfig<double> cfg;
  if (epsilon) cfg.epsilon = *epsilon;
  if (max_rounds) cfg.max_rounds = *max_rounds;
  if (init) cfg.init = *init;
  return cfg;
}

Pool pool_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": must be an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw InputError(where + ".kind: missing or not a string");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant_product")
    return Pool::constant_product(positive_number(j, "reserve_x", where), positive_number(j, "reserve_y", where));
  if (kind == "constant_sum")
    return Pool::constant_sum(positive_number(j, "rate", where), positive_number(j, "reserve_y", where));
  throw InputError(where + ".kind: unknown curve kind \"" + kind + "\"");
}

json pool_to_json(const Pool& pool) {
  if (pool.kind == CurveKind::constant_sum)
    return {{"kind", "constant_sum"}, {"rate", pool.rate}, {"reserve_y", pool.reserve_y}};
  return {{"kind", "constant_product"}, {"reserve_x", pool.reserve_x}, {"reserve_y", pool.reserve_y}};
}

InitStrategy init_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "all_to_best") return InitStrategy::all_to_best();
    throw InputError("init: unknown strategy " + j.dump());
  }
  if (j.is_object() && j.size() == 1 && j.contains("marginal_greedy"))
    return InitStrategy::marginal_greedy(positive_integer(j.at("marginal_greedy"), "init.marginal_greedy"));
  throw InputError("init: expected \"all_to_best\" or {\"marginal_greedy\": <chunks>}");
}

json init_to_json(const InitStrategy& init) {
  if (init.kind == InitStrategy::Kind::all_to_best) return "all_to_best";
  return {{"marginal_greedy", init.chunks}};
}

InitStrategy parse_init(const std::string& text) {
  if (text == "all_to_best") return InitStrategy::all_to_best();
  for (const std::string prefix : {"marginal_greedy:", "greedy:"}) {
    if (text.rfind(prefix, 0) != 0) continue;
    const std::string count = text.substr(prefix.size());
    std::size_t used = 0;
    long long chunks = 0;
    try {
      chunks = std::stoll(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count.size() || count.empty() || chunks < 1)
      throw InputError("--init: chunk count must be a positive integer, got \"" + count + "\"");
    return InitStrategy::marginal_greedy(chunks);
  }
  throw InputError("--init: expected all_to_best or marginal_greedy:<chunks>, got \"" + text + "\"");
}

std::string to_string(const InitStrategy& init) {
  if (init.kind == InitStrategy::Kind::all_to_best) return "all_to_best";
  return "marginal_greedy:" + std::to_string(init.chunks);
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw InputError("instance: top level must be an object");
  Instance inst;
  if (!j.contains("pools") || !j.at("pools").is_array()) throw InputError("pools: missing or not an array");
  const auto& pools = j.at("pools");
  if (pools.empty()) throw InputError("pools: must contain at least one pool");
  for (std::size_t i = 0; i < pools.size(); ++i)
    inst.pools.push_back(pool_from_json(pools[i], "pools[" + std::to_string(i) + "]"));

  if (!j.contains("amount_in") || !j.at("amount_in").is_number()) throw InputError("amount_in: missing or not a number");
  inst.amount_in = j.at("amount_in").get<double>();
  if (!(inst.amount_in > 0.0) || !std::isfinite(inst.amount_in))
    throw InputError("amount_in: must be a positive finite number, got " + j.at("amount_in").dump());

  if (j.contains("epsilon")) {
    const auto& e = j.at("epsilon");
    if (!e.is_number() || !(e.get<double>() > 0.0)) throw InputError("epsilon: must be a positive number");
    inst.epsilon = e.get<double>();
  }
  if (j.contains("max_rounds")) inst.max_rounds = positive_integer(j.at("max_rounds"), "max_rounds");
  if (j.contains("init")) inst.init = init_from_json(j.at("init"));
  return inst;
}

json instance_to_json(const Instance& inst) {
  json pools = json::array();
  for (const auto& p : inst.pools) pools.push_back(pool_to_json(p));
  json j = {{"pools", pools}, {"amount_in", inst.amount_in}};
  if (inst.epsilon) j["epsilon"] = *inst.epsilon;
  if (inst.max_rounds) j["max_rounds"] = *inst.max_rounds;
  if (inst.init) j["init"] = init_to_json(*inst.init);
  return j;
}

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const std::domain_error& e) {
    throw InputError(e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "round,donor,receiver,delta,halvings,price_donor,price_receiver,objective,gap_g\n";
  for (const auto& r : trace) {
    out << r.round << ',' << r.donor << ',' << r.receiver << ',' << format_number(r.delta) << ',' << r.halvings
        << ',' << format_number(r.price_donor) << ',' << format_number(r.price_receiver) << ','
        << format_number(r.objective_before) << ',' << format_number(r.gap_g) << '\n';
  }
}

void write_bounds_csv(std::ostream& out, const BoundReport& report) {
  out << "round,h,g,improvement,lemma3_rhs,lemma3_pass,lemma4_rhs,lemma4_pass,envelope,rate_pass,interval_lo,"
         "interval_hi\n";
  auto flag = [](bool applicable, bool pass) { return applicable ? (pass ? "1" : "0") : "na"; };
  for (const auto& r : report.rows) {
    out << r.round << ',' << format_number(r.h) << ',' << format_number(r.g) << ',' << format_number(r.improvement)
        << ',' << format_number(r.lemma3_rhs) << ',' << flag(true, r.lemma3_pass) << ','
        << format_number(r.lemma4_rhs) << ',' << flag(r.lemma4_applicable, r.lemma4_pass) << ','
        << format_number(r.envelope) << ',' << flag(r.rate_applicable, r.rate_pass) << ','
        << format_number(r.interval_lo) << ',' << format_number(r.interval_hi) << '\n';
  }
}

}  // namespace onehop
