#include "onehop/instance_io.hpp"

#include <sstream>

#include <gtest/gtest.h>

using namespace onehop;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseInstance, Minimal) {
  const auto inst = parse_instance(R"({"pools": [{"kind": "constant_product", "reserve_x": 100, "reserve_y": 100},
                                                 {"kind": "constant_sum", "rate": 2, "reserve_y": 50}],
                                       "amount_in": 100})");
  ASSERT_EQ(inst.pools.size(), 2u);
  EXPECT_EQ(inst.pools[1].kind, CurveKind::constant_sum);
  EXPECT_EQ(inst.pools[1].rate, 2.0);
  EXPECT_EQ(inst.amount_in, 100.0);
  EXPECT_FALSE(inst.epsilon);
  const auto cfg = inst.config();
  EXPECT_EQ(cfg.epsilon, SolverConfig<double>{}.epsilon);
  EXPECT_EQ(cfg.init, InitStrategy::all_to_best());
}

TEST(ParseInstance, OptionalFields) {
  const auto inst = parse_instance(R"({"pools": [{"kind": "constant_product", "reserve_x": 1, "reserve_y": 2}],
                                       "amount_in": 0.5, "epsilon": 1e-6, "max_rounds": 7,
                                       "init": {"marginal_greedy": 20}})");
  const auto cfg = inst.config();
  EXPECT_EQ(cfg.epsilon, 1e-6);
  EXPECT_EQ(cfg.max_rounds, 7);
  EXPECT_EQ(cfg.init, InitStrategy::marginal_greedy(20));
}

TEST(ParseInstance, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"pools": [{"kind": "constant_product", "reserve_x": -5, "reserve_y": 100}],
                         "amount_in": 1})")
                .find("pools[0].reserve_x"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"pools": [{"kind": "weighted", "reserve_x": 1, "reserve_y": 1}], "amount_in": 1})")
                .find("pools[0].kind"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"pools": [], "amount_in": 1})").find("pools"), std::string::npos);
  EXPECT_NE(error_of(R"({"pools": [{"kind": "constant_sum", "rate": 1, "reserve_y": 1}]})").find("amount_in"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"pools": [{"kind": "constant_sum", "rate": 1, "reserve_y": 1}], "amount_in": 1,
                         "max_rounds": 0})")
                .find("max_rounds"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"pools": [{"kind": "constant_sum", "rate": 1, "reserve_y": 1}], "amount_in": 1,
                         "init": "random"})")
                .find("init"),
            std::string::npos);
}

TEST(ParseInstance, MalformedJsonReportsPosition) {
  const auto msg = error_of("{\"pools\": [\n  {\"kind\": }\n]}");
  EXPECT_NE(msg.find("malformed JSON"), std::string::npos);
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(ParseInstance, MissingFileIsInputError) {
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), InputError);
}

TEST(InstanceJson, RoundTrip) {
  Instance inst;
  inst.pools = {Pool::constant_product(123.25, 0.5), Pool::constant_sum(3.0, 9.0)};
  inst.amount_in = 42.0;
  inst.max_rounds = 10;
  inst.init = InitStrategy::marginal_greedy(3);
  const auto back = parse_instance(instance_to_json(inst).dump());
  ASSERT_EQ(back.pools.size(), 2u);
  EXPECT_EQ(back.pools[0].reserve_x, 123.25);
  EXPECT_EQ(back.pools[0].reserve_y, 0.5);
  EXPECT_EQ(back.pools[1].rate, 3.0);
  EXPECT_EQ(back.amount_in, 42.0);
  EXPECT_EQ(back.max_rounds, 10);
  EXPECT_FALSE(back.epsilon);
  EXPECT_EQ(back.init, InitStrategy::marginal_greedy(3));
}

TEST(ParseInit, Forms) {
  EXPECT_EQ(parse_init("all_to_best"), InitStrategy::all_to_best());
  EXPECT_EQ(parse_init("marginal_greedy:1000"), InitStrategy::marginal_greedy(1000));
  EXPECT_EQ(parse_init("greedy:5"), InitStrategy::marginal_greedy(5));
  EXPECT_THROW(parse_init("greedy:0"), InputError);
  EXPECT_THROW(parse_init("greedy:5x"), InputError);
  EXPECT_THROW(parse_init("greedy:"), InputError);
  EXPECT_THROW(parse_init("best"), InputError);
  EXPECT_EQ(to_string(InitStrategy::marginal_greedy(12)), "marginal_greedy:12");
  EXPECT_EQ(parse_init(to_string(InitStrategy::all_to_best())), InitStrategy::all_to_best());
}

TEST(FormatNumber, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(100.0), "100");
  const double v = 2.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(TraceCsv, HeaderAndRow) {
  Trace trace(1);
  trace[0].round = 0;
  trace[0].donor = 0;
  trace[0].receiver = 1;
  trace[0].delta = 50.0;
  trace[0].price_donor = 4.0;
  trace[0].price_receiver = 1.0;
  trace[0].objective_before = 50.0;
  trace[0].gap_g = 0.75;
  std::ostringstream os;
  write_trace_csv(os, trace);
  EXPECT_EQ(os.str(),
            "round,donor,receiver,delta,halvings,price_donor,price_receiver,objective,gap_g\n"
            "0,0,1,50,0,4,1,50,0.75\n");
}

TEST(BoundsCsv, FlagsRenderAsOneZeroOrNa) {
  BoundReport rep;
  BoundRow row;
  row.lemma4_applicable = false;
  row.rate_pass = false;
  rep.rows.push_back(row);
  std::ostringstream os;
  write_bounds_csv(os, rep);
  EXPECT_EQ(os.str(),
            "round,h,g,improvement,lemma3_rhs,lemma3_pass,lemma4_rhs,lemma4_pass,envelope,rate_pass,interval_lo,"
            "interval_hi\n"
            "0,0,0,0,0,1,0,na,0,0,0,0\n");
}
