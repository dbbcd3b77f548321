#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "ktag/checker.hpp"
#include "ktag/protocols.hpp"
#include "ktag/sweep.hpp"

using namespace ktag;

namespace {

SimOptions opts(const std::string& inputs, const std::string& crashes = "",
                PolicyKind pol = PolicyKind::Prefer0, std::uint64_t seed = 1) {
  SimOptions o;
  o.inputs = InputVector::from_string(inputs);
  o.pattern = CrashSchedule::parse(crashes).compile();
  o.sched = SchedulerSpec::fair();
  o.policy_override = OraclePolicy{pol, seed};
  o.step_bound = 10000;
  return o;
}

std::map<ProcessId, int> first_decisions(const Run& r) {
  std::map<ProcessId, int> out;
  for (auto& [p, ds] : r.decisions()) out[p] = ds.front().first;
  return out;
}

void expect_all_decide(const Run& r, int v, int expected_count) {
  auto dec = first_decisions(r);
  REQUIRE(static_cast<int>(dec.size()) == expected_count);
  for (auto& [p, d] : dec) {
    INFO("process ", p);
    CHECK(d == v);
  }
}

SweepOutcome smoke_sweep(ProtocolSpec proto, std::optional<OracleMode> mode = {}) {
  SweepConfig cfg;
  cfg.proto = std::move(proto);
  cfg.task = cfg.proto.solves;
  cfg.crash_samples = 12;
  cfg.seeds = 2;
  cfg.mode_override = mode;
  cfg.master_seed = 99;
  return cfg.proto.n <= 6 ? run_sweep(cfg) : SweepOutcome{};
}

}  // namespace

TEST_CASE("direct reduction: one consultation, extra consultant silent") {
  auto proto = make_direct(2, 1, 1);
  REQUIRE(proto.oracles.size() == 1);
  CHECK(proto.oracles[0].consultants.size() == 3);

  expect_all_decide(simulate(proto, opts("01")), 0, 2);
  expect_all_decide(simulate(proto, opts("11")), 1, 2);

  // A crash before querying leaves {0,1}; the verdict still passes.
  Run r = simulate(proto, opts("11", "1@0"));
  auto dec = first_decisions(r);
  REQUIRE(dec.size() == 1);
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
}

TEST_CASE("fig1 solves (f+1)-TAg via one Consensus consultation") {
  auto proto = make_fig1(3, 1);
  expect_all_decide(simulate(proto, opts("001")), 0, 3);
  expect_all_decide(simulate(proto, opts("111", "", PolicyKind::Prefer1)), 1, 3);
  Run r = simulate(proto, opts("011", "1@0"));
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
}

TEST_CASE("fig2, all ones, no crashes: consistency forces decide 1") {
  auto proto = make_fig2(3, 1);
  Run r = simulate(proto, opts("111", "", PolicyKind::Prefer1));
  expect_all_decide(r, 1, 3);
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
}

TEST_CASE("fig2, a zero majority forces 0 through the first consultation") {
  auto proto = make_fig2(3, 1);
  Run r = simulate(proto, opts("001"));
  expect_all_decide(r, 0, 3);
}

TEST_CASE("fig2 takes the round path when the oracle reports f failures") {
  auto proto = make_fig2(3, 1);
  // p3 crashes mid-run; the future-seeing oracle answers 0 twice and the
  // survivors settle by exchange.
  Run r = simulate(proto, opts("111", "3@9", PolicyKind::Prefer0));
  auto dec = first_decisions(r);
  REQUIRE(dec.count(1));
  REQUIRE(dec.count(2));
  CHECK(dec[1] == 1);
  CHECK(dec[2] == 1);
  Verdict v = check_all(r, proto.solves, proto);
  CHECK(v.overall() == Status::Pass);
  bool saw_round = false;
  for (const auto& e : r.history)
    if (e.kind == EventKind::Send && e.msg.tag == "R") saw_round = true;
  CHECK(saw_round);
}

TEST_CASE("fig3max: zeros reach every leave-one-out oracle") {
  auto proto = make_fig3(2, 1, 1, true);  // 3 processes, task kTAg(2)(3,1)
  expect_all_decide(simulate(proto, opts("001")), 0, 3);
  expect_all_decide(simulate(proto, opts("111")), 1, 3);
  Run r = simulate(proto, opts("111", "3@0"));
  auto dec = first_decisions(r);
  REQUIRE(dec.size() == 2);
  for (auto& [p, d] : dec) CHECK(d == 1);  // the crash-free subset forces 1
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
}

TEST_CASE("fig3min decides the minimum and lifts the threshold unchanged") {
  auto proto = make_fig3(2, 1, 1, false);  // solves kTAg(1)(3,1)
  expect_all_decide(simulate(proto, opts("011")), 0, 3);
  expect_all_decide(simulate(proto, opts("111")), 1, 3);
}

TEST_CASE("fig4 sham path decides 1 on all-ones without crashes") {
  auto proto = make_fig4(2, 1);
  Run r = simulate(proto, opts("11"));
  expect_all_decide(r, 1, 2);
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
}

TEST_CASE("fig4: crash between consultations flips to the exchange branch") {
  auto proto = make_fig4(2, 1);
  Run r = simulate(proto, opts("11", "2@5"));
  auto dec = first_decisions(r);
  REQUIRE(dec.count(1));
  CHECK(dec[1] == 1);
  // d = 0 exchange happened: an input broadcast exists.
  bool saw_exchange = false;
  for (const auto& e : r.history)
    if (e.kind == EventKind::Send && e.msg.tag == "V") saw_exchange = true;
  CHECK(saw_exchange);
  TaskSpec target{ProblemSpec::ktag(2, 2), 1};
  CHECK(check_task_conditions(r, target).overall() == Status::Pass);
}

TEST_CASE("fig4 handles a correct minority (n=3, f=2)") {
  auto proto = make_fig4(3, 2);
  Run r = simulate(proto, opts("111"));
  expect_all_decide(r, 1, 3);
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
}

TEST_CASE("noop reduction runs when the generalization holds") {
  // Cons(3,1) via a kTAg(2)(3,1) oracle.
  auto proto = make_noop({ProblemSpec::cons(3), 1}, {ProblemSpec::ktag(2, 3), 1});
  Run r = simulate(proto, opts("110"));
  CHECK(check_all(r, proto.solves, proto).overall() == Status::Pass);
  // WAg(3,1) via Cons(3,1).
  auto proto2 = make_noop({ProblemSpec::wag(3), 1}, {ProblemSpec::cons(3), 1});
  Run r2 = simulate(proto2, opts("000"));
  CHECK(check_all(r2, proto2.solves, proto2).overall() == Status::Pass);
}

TEST_CASE("noop refuses a non-generalization with the witness") {
  CHECK_THROWS_AS(make_noop({ProblemSpec::ac(3), 1}, {ProblemSpec::cons(3), 2}),
                  ParameterError);
}

TEST_CASE("protocol preconditions reject bad parameters") {
  CHECK_THROWS_AS(make_fig1(3, 0), ParameterError);
  CHECK_THROWS_AS(make_fig1(3, 3), ParameterError);
  CHECK_THROWS_AS(make_direct(3, 1, 4), ParameterError);
  CHECK_THROWS_AS(make_fig3(3, 3, 1, true), ParameterError);
  CHECK_THROWS_AS(make_naive_cons_candidate(3, 1, 2), ParameterError);
}

TEST_CASE("smoke sweeps stay clean on small configurations") {
  CHECK(smoke_sweep(make_fig1(3, 1)).fail == 0);
  CHECK(smoke_sweep(make_fig2(3, 1)).fail == 0);
  CHECK(smoke_sweep(make_fig3(2, 1, 1, true)).fail == 0);
  CHECK(smoke_sweep(make_fig3(2, 1, 1, false)).fail == 0);
  CHECK(smoke_sweep(make_fig4(2, 1)).fail == 0);
  CHECK(smoke_sweep(make_direct(3, 1, 1)).fail == 0);
  auto s = smoke_sweep(make_fig2(3, 1));
  CHECK(s.inconclusive == 0);
}

TEST_CASE("fig2 processes keep one round of participation after deciding") {
  auto proto = make_fig2(3, 1);
  Run r = simulate(proto, opts("111", "3@9"));
  // Every decider sends R-messages for the round after its first decision.
  for (auto& [p, ds] : r.decisions()) {
    Time first = 0;
    int decide_round = -1;
    for (const auto& e : r.history) {
      if (e.pid != p) continue;
      if (e.kind == EventKind::Decide && first == 0) first = e.t;
    }
    int max_round_sent = 0;
    for (const auto& e : r.history)
      if (e.pid == p && e.kind == EventKind::Send && e.msg.tag == "R")
        max_round_sent = std::max(max_round_sent, e.msg.vals.at(1));
    (void)decide_round;
    if (first > 0 && !r.pattern.is_faulty(p)) CHECK(max_round_sent >= 1);
  }
}
