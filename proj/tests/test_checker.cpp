#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "ktag/checker.hpp"
#include "ktag/protocols.hpp"

using namespace ktag;

namespace {

Event decide_ev(ProcessId p, int v, Time t) {
  Event e;
  e.t = t;
  e.loc = kLocalLoc;
  e.pid = p;
  e.kind = EventKind::Decide;
  e.value = v;
  return e;
}

Run synthetic_run(int n, const std::string& inputs,
                  std::vector<Event> history, FailurePattern pattern = {}) {
  Run r;
  r.n = n;
  r.inputs = InputVector::from_string(inputs);
  r.pattern = std::move(pattern);
  r.history = std::move(history);
  r.meta.protocol = "synthetic";
  return r;
}

}  // namespace

TEST_CASE("fig4 run at (2,1) all-ones passes every condition") {
  auto proto = make_fig4(2, 1);
  SimOptions o;
  o.inputs = InputVector::from_string("11");
  Run r = simulate(proto, o);
  TaskSpec task{ProblemSpec::ktag(2, 2), 1};
  Verdict v = check_task_conditions(r, task);
  CHECK(v.status_of("termination") == Status::Pass);
  CHECK(v.status_of("agreement") == Status::Pass);
  CHECK(v.status_of("irrevocability") == Status::Pass);
  CHECK(v.status_of("validity1") == Status::Vacuous);  // zero zeros < k
  CHECK(v.status_of("validity2") == Status::Pass);     // all-ones, m=0 <= 1
  CHECK(v.overall() == Status::Pass);
}

TEST_CASE("split decisions fail agreement with both events cited") {
  Run r = synthetic_run(2, "11", {decide_ev(1, 0, 1), decide_ev(2, 1, 2)});
  TaskSpec task{ProblemSpec::cons(2), 1};
  Verdict v = check_task_conditions(r, task);
  REQUIRE(v.status_of("agreement") == Status::Fail);
  CHECK(v.find("agreement")->evidence.size() == 2);
}

TEST_CASE("decisions by later-crashed processes still count for agreement") {
  FailurePattern f;
  f.set_crash(1, 10);
  Run r = synthetic_run(2, "11", {decide_ev(1, 0, 1), decide_ev(2, 1, 12)}, f);
  TaskSpec task{ProblemSpec::cons(2), 1};
  CHECK(check_task_conditions(r, task).status_of("agreement") == Status::Fail);
}

TEST_CASE("exceeding the resiliency bound makes everything vacuous") {
  FailurePattern f;
  f.set_crash(1, 0);
  f.set_crash(2, 0);
  Run r = synthetic_run(3, "111", {decide_ev(3, 0, 1)}, f);
  TaskSpec task{ProblemSpec::cons(3), 1};
  Verdict v = check_task_conditions(r, task);
  for (const auto& c : v.conditions) CHECK(c.status == Status::Vacuous);
  CHECK(v.overall() == Status::Pass);
}

TEST_CASE("validity part 1: enough zeros force zero decisions") {
  TaskSpec task{ProblemSpec::ktag(1, 3), 1};
  Run bad = synthetic_run(3, "011",
                          {decide_ev(1, 1, 1), decide_ev(2, 1, 2), decide_ev(3, 1, 3)});
  CHECK(check_task_conditions(bad, task).status_of("validity1") == Status::Fail);
  Run good = synthetic_run(3, "011",
                           {decide_ev(1, 0, 1), decide_ev(2, 0, 2), decide_ev(3, 0, 3)});
  CHECK(check_task_conditions(good, task).status_of("validity1") == Status::Pass);
}

TEST_CASE("validity part 2 is conditioned on the failure count") {
  Run r = synthetic_run(3, "111",
                        {decide_ev(1, 0, 1), decide_ev(2, 0, 2), decide_ev(3, 0, 3)});
  CHECK(check_task_conditions(r, {ProblemSpec::ktag(2, 3), 1}).status_of(
            "validity2") == Status::Fail);  // m=0 <= k-1
  FailurePattern f;
  f.set_crash(3, 50);
  Run r2 = synthetic_run(3, "111", {decide_ev(1, 0, 1), decide_ev(2, 0, 2)}, f);
  CHECK(check_task_conditions(r2, {ProblemSpec::ktag(1, 3), 1}).status_of(
            "validity2") == Status::Vacuous);  // m=1 > k-1=0
}

TEST_CASE("irrevocability flags a flipped decision") {
  Run r = synthetic_run(2, "11",
                        {decide_ev(1, 1, 1), decide_ev(2, 1, 2), decide_ev(1, 0, 3)});
  TaskSpec task{ProblemSpec::cons(2), 1};
  Verdict v = check_task_conditions(r, task);
  CHECK(v.status_of("irrevocability") == Status::Fail);
}

TEST_CASE("termination distinguishes deadlock from the step bound") {
  TaskSpec task{ProblemSpec::cons(2), 1};
  Run stuck = synthetic_run(2, "11", {decide_ev(1, 1, 1)});
  CHECK(check_task_conditions(stuck, task).status_of("termination") ==
        Status::Fail);
  Run bounded = stuck;
  bounded.hit_bound = true;
  CHECK(check_task_conditions(bounded, task).status_of("termination") ==
        Status::Inconclusive);
}

TEST_CASE("WAg validity binds only on unanimous failure-free runs") {
  TaskSpec task{ProblemSpec::wag(2), 1};
  Run r = synthetic_run(2, "00", {decide_ev(1, 1, 1), decide_ev(2, 1, 2)});
  CHECK(check_task_conditions(r, task).status_of("validity1") == Status::Fail);
  FailurePattern f;
  f.set_crash(2, 99);
  Run r2 = synthetic_run(2, "00", {decide_ev(1, 1, 1)}, f);
  CHECK(check_task_conditions(r2, task).status_of("validity1") ==
        Status::Vacuous);
}

TEST_CASE("monotone severity: appending decide events never repairs validity") {
  TaskSpec task{ProblemSpec::ktag(1, 2), 1};
  Run r = synthetic_run(2, "01", {decide_ev(1, 1, 1)});
  Verdict before = check_task_conditions(r, task);
  REQUIRE(before.status_of("validity1") == Status::Fail);
  r.history.push_back(decide_ev(2, 0, 2));
  Verdict after = check_task_conditions(r, task);
  CHECK(after.status_of("validity1") == Status::Fail);
}

TEST_CASE("check_all composes structure, oracle history and task conditions") {
  auto proto = make_fig1(3, 1);
  SimOptions o;
  o.inputs = InputVector::from_string("010");
  Run r = simulate(proto, o);
  Verdict v = check_all(r, proto.solves, proto);
  CHECK(v.overall() == Status::Pass);
  CHECK(v.find("R3.channels") != nullptr);
  CHECK(v.find("R1[o1].suitability") != nullptr);
  CHECK(v.find("task.agreement") != nullptr);
}
