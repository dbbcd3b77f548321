#include "ktag/adversary.hpp"

#include <algorithm>

namespace ktag {

namespace {

bool validity_fail(const Verdict& v) {
  return v.status_of("validity1") == Status::Fail ||
         v.status_of("validity2") == Status::Fail;
}

// Latest first-decision time among `who`; nullopt if someone never decides.
std::optional<Time> all_decided_by(const Run& run,
                                   const std::vector<ProcessId>& who) {
  Time theta = 0;
  for (ProcessId p : who) {
    auto t = run.first_decision_time_of(p);
    if (!t) return std::nullopt;
    theta = std::max(theta, *t);
  }
  return theta;
}

void check_single_oracle(const ProtocolSpec& candidate, const ProblemSpec& want,
                         int want_f, const std::string& driver) {
  if (candidate.oracles.size() != 1 ||
      candidate.oracles[0].problem != want || candidate.oracles[0].f != want_f)
    throw ParameterError(driver + ": candidate must use one " +
                         TaskSpec{want, want_f}.label() + " oracle");
}

}  // namespace

bool Ir1Result::validity_fail_somewhere() const {
  return validity_fail(v_rho) || validity_fail(v_flipped) || validity_fail(v_rho0);
}

bool Ir1Result::structure_clean() const {
  return s_rho.overall() != Status::Fail &&
         s_flipped.overall() != Status::Fail && s_rho0.overall() != Status::Fail;
}

Ir1Result build_ir1(const ProtocolSpec& candidate, int n, int f, int k,
                    long bound) {
  if (!(1 <= k && k <= f && f <= n - 1))
    throw ParameterError("build_ir1: need 1 <= k <= f <= n-1");
  if (candidate.n != n) throw ParameterError("build_ir1: candidate size mismatch");
  check_single_oracle(candidate, ProblemSpec::cons(n), n - 1, "build_ir1");

  const TaskSpec target{ProblemSpec::ktag(k, n), f};
  std::vector<ProcessId> pi1;
  for (int p = 1; p <= k; ++p) pi1.push_back(p);

  Ir1Result res;

  SimOptions opt;
  opt.inputs = InputVector::all(n, 1);
  for (ProcessId p : pi1) opt.pattern.set_crash(p, 0);
  opt.sched = SchedulerSpec::fair();
  opt.step_bound = bound;
  opt.mode_override = OracleMode::General;
  opt.policy_override = OraclePolicy{PolicyKind::Prefer0, 0};
  res.rho = simulate(candidate, opt);

  std::vector<ProcessId> deciders;
  for (ProcessId p = k + 1; p <= n; ++p) deciders.push_back(p);
  auto t0 = all_decided_by(res.rho, deciders);
  if (!t0) {
    res.inconclusive = true;
    res.note = "candidate stalls before every survivor decides";
    return res;
  }

  res.rho_flipped = flip_inputs(res.rho, pi1, 0);
  res.rho0 = fair_extension(truncate_run(res.rho, *t0), candidate, bound);

  res.v_rho = check_task_conditions(res.rho, target);
  res.v_flipped = check_task_conditions(res.rho_flipped, target);
  res.v_rho0 = check_task_conditions(res.rho0, target);
  res.s_rho = validate_run_structure(res.rho, candidate);
  res.s_flipped = validate_run_structure(res.rho_flipped, candidate);
  res.s_rho0 = validate_run_structure(res.rho0, candidate);
  return res;
}

bool Ir3Result::demonstrated(OracleMode mode) const {
  if (mode == OracleMode::Sham) return blocked.has_value();
  return !inconclusive && s_merged.overall() != Status::Fail &&
         v_merged.status_of("agreement") == Status::Fail;
}

namespace {

// Scan a sanctuary's Q/A events under the frozen-prefix view F_t; the first
// answer outside the allowed set is the sham blocking certificate.
std::optional<Ir3Blocked> first_sham_illegal(const Run& run,
                                             const OracleSpecInfo& spec) {
  std::map<ProcessId, int> answered;
  std::map<ProcessId, bool> pending;
  std::vector<PartialVector> vectors;
  for (size_t i = 0; i < run.history.size(); ++i) {
    const Event& e = run.history[i];
    if (e.loc != spec.sanctuary) continue;
    if (e.kind == EventKind::Query) {
      int idx = answered[e.pid] + 1;
      while (static_cast<int>(vectors.size()) < idx) vectors.emplace_back();
      vectors[static_cast<size_t>(idx - 1)].set(e.pid, e.value);
      pending[e.pid] = true;
    } else if (e.kind == EventKind::Answer) {
      if (!pending[e.pid]) continue;
      int idx = answered[e.pid] + 1;
      const PartialVector& w = vectors[static_cast<size_t>(idx - 1)];
      int fc = run.pattern.faulty_count_within_at(spec.consultants, e.t);
      DecisionSet allowed = oracle_allowed(spec.problem, fc, w);
      if (!allowed.contains(e.value)) {
        Ir3Blocked b;
        b.event_index = static_cast<long>(i);
        b.event = e;
        b.vector = w;
        b.view_fc = fc;
        b.allowed = allowed;
        b.explain = "answer " + std::to_string(e.value) + " to vector " +
                    w.str(spec.consultants) + " at t=" + std::to_string(e.t) +
                    " needs allowed set " + allowed.str() + " under F_t view (" +
                    std::to_string(fc) + " crashed so far)";
        return b;
      }
      answered[e.pid] += 1;
      pending[e.pid] = false;
    }
  }
  return std::nullopt;
}

}  // namespace

Ir3Result build_ir3(const ProtocolSpec& candidate, int n, int f,
                    OracleMode mode, long bound) {
  if (!(1 <= f && f <= n - 1 && n <= 2 * f))
    throw ParameterError("build_ir3: need 1 <= f <= n-1 and n <= 2f");
  if (candidate.n != n) throw ParameterError("build_ir3: candidate size mismatch");
  check_single_oracle(candidate, ProblemSpec::ktag(f, n), f, "build_ir3");

  const TaskSpec target{ProblemSpec::ktag(f + 1, n), f};

  // Pi' = f lowest ids (inputs 0), pi' = 2f-n lowest of those, Pi'' = rest.
  std::vector<ProcessId> pi_prime, pi_small, pi_dbl;
  for (int p = 1; p <= f; ++p) pi_prime.push_back(p);
  for (int p = 1; p <= 2 * f - n; ++p) pi_small.push_back(p);
  for (int p = f + 1; p <= n; ++p) pi_dbl.push_back(p);
  std::vector<ProcessId> rho_prime_deciders;
  for (int p = 2 * f - n + 1; p <= f; ++p) rho_prime_deciders.push_back(p);

  InputVector inputs = InputVector::all(n, 1);
  for (ProcessId p : pi_prime) inputs.set(p, 0);

  Ir3Result res;

  // rho': pi' and Pi'' initially crashed, oracle steered to 0.
  {
    SimOptions opt;
    opt.inputs = inputs;
    for (ProcessId p : pi_small) opt.pattern.set_crash(p, 0);
    for (ProcessId p : pi_dbl) opt.pattern.set_crash(p, 0);
    opt.sched = SchedulerSpec::fair();
    opt.step_bound = bound;
    opt.mode_override = OracleMode::General;
    opt.forced_answer = 0;
    res.rho_prime = simulate(candidate, opt);
  }
  auto theta1 = all_decided_by(res.rho_prime, rho_prime_deciders);
  if (!theta1) {
    res.inconclusive = true;
    res.note = "candidate stalls in rho'";
    theta1 = res.rho_prime.last_time();
  }
  Run h1 = truncate_run(res.rho_prime, *theta1);

  // rho'': Pi' initially crashed, events timed after theta', message ids
  // disjoint from rho' so the concatenation keeps R3 accounting exact.
  {
    long seq_start = 0;
    for (const auto& e : res.rho_prime.history)
      if (e.kind == EventKind::Send) seq_start = std::max(seq_start, e.seq + 1);
    SimOptions opt;
    opt.inputs = inputs;
    for (ProcessId p : pi_prime) opt.pattern.set_crash(p, 0);
    opt.sched = SchedulerSpec::fair();
    opt.step_bound = bound;
    opt.start_time = *theta1;
    opt.seq_start = seq_start;
    opt.mode_override = OracleMode::General;
    opt.forced_answer = 0;
    res.rho_dblprime = simulate(candidate, opt);
  }
  auto theta2 = all_decided_by(res.rho_dblprime, pi_dbl);
  if (!theta2) {
    res.inconclusive = true;
    if (res.note.empty()) res.note = "candidate stalls in rho''";
    theta2 = std::max(res.rho_dblprime.last_time(), *theta1);
  }
  Run h2 = truncate_run(res.rho_dblprime, *theta2);

  // Merged pattern: failure free through theta'', then Pi' crashes.
  FailurePattern merged_f;
  for (ProcessId p : pi_prime) merged_f.set_crash(p, *theta2 + 1);

  Run base;
  base.n = n;
  base.inputs = inputs;
  base.pattern = merged_f;
  base.oracles = res.rho_prime.oracles;
  for (auto& o : base.oracles) o.mode = mode;
  base.history = h1.history;
  base.history.insert(base.history.end(), h2.history.begin(), h2.history.end());
  base.meta = res.rho_prime.meta;

  ResumeOptions ro;
  ro.pattern = merged_f;
  ro.answer_rule = AnswerRule::Normal;
  ro.forced_answer = 0;
  ro.mode_override = OracleMode::General;  // extension answers stay legal
  ro.step_bound = bound;
  res.merged = resume_run(base, candidate, ro);
  for (auto& o : res.merged.oracles) o.mode = mode;

  res.v_prime = check_task_conditions(res.rho_prime, target);
  res.v_dbl = check_task_conditions(res.rho_dblprime, target);
  res.v_merged = check_task_conditions(res.merged, target);
  res.s_merged = validate_run_structure(res.merged, candidate);

  if (mode == OracleMode::Sham)
    res.blocked = first_sham_illegal(res.merged, res.merged.oracles.at(0));

  return res;
}

}  // namespace ktag
