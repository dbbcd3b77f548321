#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ktag/adversary.hpp"
#include "ktag/checker.hpp"
#include "ktag/protocols.hpp"
#include "ktag/sweep.hpp"
#include "ktag/trace.hpp"

using namespace ktag;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitUsage = 64;

int exit_code_for(Status s) {
  switch (s) {
    case Status::Fail: return kExitFail;
    case Status::Inconclusive: return kExitInconclusive;
    default: return kExitPass;
  }
}

struct OracleArg {
  std::optional<OracleMode> mode;
  std::optional<OraclePolicy> policy;
};

OracleArg parse_oracle_arg(const std::string& s, std::uint64_t seed) {
  OracleArg out;
  if (s.empty()) return out;
  auto colon = s.find(':');
  std::string mode = s.substr(0, colon);
  if (!mode.empty()) out.mode = oracle_mode_from(mode);
  if (colon != std::string::npos) {
    OraclePolicy p;
    p.kind = policy_kind_from(s.substr(colon + 1));
    p.seed = seed;
    out.policy = p;
  }
  return out;
}

// "ktag:2" or "wag", resiliency supplied separately.
ProblemSpec parse_problem(const std::string& s, int n) {
  if (s == "wag") return ProblemSpec::wag(n);
  if (s.rfind("ktag:", 0) == 0) return ProblemSpec::ktag(std::stoi(s.substr(5)), n);
  throw ParameterError("problem must be wag or ktag:<k>: " + s);
}

// "ktag:k,n,f" (n optional when implied).
TaskSpec parse_task(const std::string& s) {
  auto c1 = s.find(':');
  auto c2 = s.find(',', c1);
  auto c3 = s.find(',', c2 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos || c3 == std::string::npos)
    throw ParameterError("task must look like ktag:k,n,f or wag:0,n,f");
  std::string kind = s.substr(0, c1);
  int k = std::stoi(s.substr(c1 + 1, c2 - c1 - 1));
  int n = std::stoi(s.substr(c2 + 1, c3 - c2 - 1));
  int f = std::stoi(s.substr(c3 + 1));
  if (kind == "wag") return {ProblemSpec::wag(n), f};
  if (kind == "ktag") return {ProblemSpec::ktag(k, n), f};
  throw ParameterError("unknown task kind: " + kind);
}

ProtocolSpec build_protocol_checked(const std::string& name, int n, int f, int k,
                                    const std::string& t1, const std::string& t2) {
  if (name == "fig2" && n <= 2 * f)
    throw ParameterError("fig2 requires n > 2f");
  if (name == "noop") {
    TaskSpec a{parse_problem(t1, n), f};
    TaskSpec b{parse_problem(t2, n), f};
    return make_noop(a, b);
  }
  if (name == "direct") return make_direct(n, f, k);
  if (name == "fig1") return make_fig1(n, f);
  if (name == "fig2") return make_fig2(n, f);
  if (name == "fig3max") return make_fig3(n, f, k, true);
  if (name == "fig3min") return make_fig3(n, f, k, false);
  if (name == "fig4") return make_fig4(n, f);
  throw ParameterError("unknown protocol: " + name);
}

void print_decisions(const Run& run) {
  auto dec = run.decisions();
  std::string line = "decisions:";
  for (ProcessId p = 1; p <= run.n; ++p) {
    line += " p" + std::to_string(p) + "=";
    auto it = dec.find(p);
    line += it == dec.end() ? "-" : std::to_string(it->second.front().first);
  }
  std::cout << line << "\n";
}

int cmd_run(const std::string& protocol, int n, int f, int k,
            const std::string& inputs_s, const std::string& crashes_s,
            const std::string& oracle_s, std::uint64_t seed,
            const std::string& sched_s, long bound, const std::string& trace_path,
            const std::string& t1, const std::string& t2, bool json) {
  ProtocolSpec proto = build_protocol_checked(protocol, n, f, k, t1, t2);
  SimOptions opt;
  opt.inputs = InputVector::from_string(inputs_s);
  if (opt.inputs.n() != proto.n)
    throw ParameterError("--inputs must name " + std::to_string(proto.n) +
                         " bits for this protocol");
  opt.pattern = CrashSchedule::parse(crashes_s).compile();
  if (opt.pattern.faulty_count() > f)
    throw ParameterError("crash schedule exceeds the resiliency bound f");
  OracleArg oa = parse_oracle_arg(oracle_s, seed);
  opt.mode_override = oa.mode;
  opt.policy_override = oa.policy;
  opt.sched = sched_s == "random" ? SchedulerSpec::random(seed)
                                  : SchedulerSpec::fair();
  opt.step_bound = bound;

  Run run = simulate(proto, opt);
  if (!trace_path.empty()) write_trace(run, trace_path);
  Verdict v = check_all(run, proto.solves, proto);
  if (json) {
    std::cout << verdict_to_json(v) << "\n";
  } else {
    print_decisions(run);
    std::cout << "verdict: " << v.summary() << " (events=" << run.history.size()
              << ")\n";
  }
  return exit_code_for(v.overall());
}

int cmd_check(const std::string& trace_path, const std::string& task_s,
              bool json) {
  Run run = read_trace(trace_path);
  ProtocolSpec proto = make_protocol_from_meta(run.meta.protocol, run.meta.params);
  TaskSpec task = task_s.empty() ? proto.solves : parse_task(task_s);
  Verdict v = check_all(run, task, proto);
  if (json)
    std::cout << verdict_to_json(v) << "\n";
  else
    std::cout << "verdict: " << v.summary() << "\n";
  return exit_code_for(v.overall());
}

int cmd_sweep(const std::string& protocol, int n, int f, int k, int trials,
              std::uint64_t seed, bool exhaustive, int crash_samples, int seeds,
              const std::string& oracle_s, long bound, const std::string& t1,
              const std::string& t2, bool json) {
  SweepConfig cfg;
  cfg.proto = build_protocol_checked(protocol, n, f, k, t1, t2);
  cfg.task = cfg.proto.solves;
  cfg.exhaustive_inputs = exhaustive;
  cfg.input_samples = trials;
  cfg.crash_samples = crash_samples;
  cfg.seeds = seeds;
  cfg.bound = bound;
  cfg.master_seed = seed;
  OracleArg oa = parse_oracle_arg(oracle_s, seed);
  cfg.mode_override = oa.mode;
  if (oa.policy) cfg.policies = {*oa.policy};

  SweepOutcome out = run_sweep(cfg);
  if (json) {
    std::cout << "{\"protocol\":\"" << protocol << "\",\"trials\":" << out.trials
              << ",\"pass\":" << out.pass << ",\"fail\":" << out.fail
              << ",\"inconclusive\":" << out.inconclusive
              << ",\"max_round\":" << out.max_round << "}\n";
  } else {
    std::printf("%-8s n=%d f=%d k=%s trials=%ld pass=%ld fail=%ld inconclusive=%ld max_rounds=%d\n",
                protocol.c_str(), n, f, k >= 0 ? std::to_string(k).c_str() : "-",
                out.trials, out.pass, out.fail, out.inconclusive, out.max_round);
    if (!out.first_bad.empty()) std::cout << "first: " << out.first_bad << "\n";
  }
  if (out.fail > 0) return kExitFail;
  if (out.inconclusive > 0) return kExitInconclusive;
  return kExitPass;
}

ProtocolSpec build_candidate(const std::string& name, int n, int f, int k) {
  if (name == "naive") return make_naive_cons_candidate(n, f, k);
  if (name == "const0") return make_const_candidate(n, f, k, 0);
  if (name == "const1") return make_const_candidate(n, f, k, 1);
  if (name == "fig4") return make_fig4(n, f);
  if (name == "fig2") return make_fig2(n, f);
  throw ParameterError("unknown candidate: " + name);
}

int cmd_refute(const std::string& construction, const std::string& candidate,
               int n, int f, int k, const std::string& mode_s, long bound,
               const std::string& out_dir, bool json) {
  if (construction == "ir1") {
    ProtocolSpec cand = build_candidate(candidate, n, f, k);
    Ir1Result r = build_ir1(cand, n, f, k, bound);
    if (!out_dir.empty() && !r.inconclusive) {
      write_trace(r.rho, out_dir + "/ir1_rho.jsonl");
      write_trace(r.rho_flipped, out_dir + "/ir1_rho_flipped.jsonl");
      write_trace(r.rho0, out_dir + "/ir1_rho0.jsonl");
    }
    if (json) {
      std::cout << "{\"construction\":\"ir1\",\"demonstrated\":"
                << (r.demonstrated() ? "true" : "false") << ",\"rho\":"
                << verdict_to_json(r.v_rho) << ",\"rho_flipped\":"
                << verdict_to_json(r.v_flipped) << ",\"rho0\":"
                << verdict_to_json(r.v_rho0) << "}\n";
    } else if (r.inconclusive) {
      std::cout << "INCONCLUSIVE: " << r.note << "\n";
    } else {
      std::cout << "rho:         " << r.v_rho.summary() << "\n";
      std::cout << "rho_flipped: " << r.v_flipped.summary() << "\n";
      std::cout << "rho0:        " << r.v_rho0.summary() << "\n";
      std::cout << (r.demonstrated() ? "demonstrated: a validity condition fails"
                                     : "not demonstrated")
                << "\n";
    }
    if (r.inconclusive) return kExitInconclusive;
    return r.demonstrated() ? kExitPass : kExitFail;
  }
  if (construction == "ir3") {
    OracleMode mode = mode_s.empty() ? OracleMode::General
                                     : oracle_mode_from(mode_s);
    ProtocolSpec cand = build_candidate(candidate, n, f, k);
    Ir3Result r = build_ir3(cand, n, f, mode, bound);
    if (!out_dir.empty()) {
      write_trace(r.rho_prime, out_dir + "/ir3_rho_prime.jsonl");
      write_trace(r.rho_dblprime, out_dir + "/ir3_rho_dblprime.jsonl");
      write_trace(r.merged, out_dir + "/ir3_merged.jsonl");
    }
    if (json) {
      std::cout << "{\"construction\":\"ir3\",\"mode\":\"" << oracle_mode_str(mode)
                << "\",\"demonstrated\":" << (r.demonstrated(mode) ? "true" : "false")
                << ",\"blocked\":" << (r.blocked ? "true" : "false")
                << ",\"merged\":" << verdict_to_json(r.v_merged) << "}\n";
    } else {
      if (r.blocked) {
        std::cout << "BLOCKED: " << r.blocked->explain << "\n";
      } else {
        std::cout << "rho':   " << r.v_prime.summary() << "\n";
        std::cout << "rho'':  " << r.v_dbl.summary() << "\n";
        std::cout << "merged: " << r.v_merged.summary()
                  << " structure: " << r.s_merged.summary() << "\n";
      }
      std::cout << (r.demonstrated(mode) ? "demonstrated" : "not demonstrated")
                << "\n";
    }
    if (r.inconclusive && !r.demonstrated(mode)) return kExitInconclusive;
    return r.demonstrated(mode) ? kExitPass : kExitFail;
  }
  throw ParameterError("construction must be ir1 or ir3");
}

int cmd_allowed(const std::string& problem_s, int k, int n,
                const std::string& inputs_s, int faulty, bool json) {
  ProblemSpec prob = problem_s == "wag" ? ProblemSpec::wag(n)
                                        : ProblemSpec::ktag(k, n);
  PartialVector w = PartialVector::from_pattern(inputs_s);
  DecisionSet d = oracle_allowed(prob, faulty, w);
  if (json)
    std::cout << "{\"allowed\":\"" << d.str() << "\"}\n";
  else
    std::cout << d.str() << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-threshold agreement simulator, protocol library and checker"};
  app.require_subcommand(1);

  std::string protocol, inputs, crashes, oracle, sched = "fair", trace, task;
  std::string t1, t2, construction, candidate, mode, out_dir, problem = "ktag";
  int n = 3, f = 1, k = -1, trials = 100, crash_samples = 200, seeds = 5,
      faulty = 0;
  std::uint64_t seed = 1;
  long bound = 10000;
  bool json = false, exhaustive = false;

  auto* run = app.add_subcommand("run", "simulate one run and judge it");
  run->add_option("--protocol", protocol,
                  "direct|fig1|fig2|fig3max|fig3min|fig4|noop")->required();
  run->add_option("--n", n)->required();
  run->add_option("--f", f)->required();
  run->add_option("--k", k);
  run->add_option("--inputs", inputs, "bitstring indexed by process id")->required();
  run->add_option("--crashes", crashes, "pid@t,pid@t,...");
  run->add_option("--oracle", oracle, "mode:policy, e.g. sham:prefer0");
  run->add_option("--seed", seed);
  run->add_option("--sched", sched, "fair|random");
  run->add_option("--bound", bound);
  run->add_option("--trace", trace, "write a JSONL trace here");
  run->add_option("--t1", t1, "noop target problem, e.g. wag or ktag:2");
  run->add_option("--t2", t2, "noop oracle problem");
  run->add_flag("--json", json);

  auto* check = app.add_subcommand("check", "re-judge a recorded trace");
  check->add_option("--trace", trace)->required();
  check->add_option("--task", task, "ktag:k,n,f override");
  check->add_flag("--json", json);

  auto* sweep = app.add_subcommand("sweep", "randomized soundness sweep");
  sweep->add_option("--protocol", protocol)->required();
  sweep->add_option("--n", n)->required();
  sweep->add_option("--f", f)->required();
  sweep->add_option("--k", k);
  sweep->add_option("--trials", trials, "input samples when not exhaustive");
  sweep->add_option("--seed", seed);
  sweep->add_flag("--exhaustive-inputs", exhaustive);
  sweep->add_option("--crash-samples", crash_samples);
  sweep->add_option("--seeds", seeds, "scheduler seeds per case");
  sweep->add_option("--oracle", oracle);
  sweep->add_option("--bound", bound);
  sweep->add_option("--t1", t1);
  sweep->add_option("--t2", t2);
  sweep->add_flag("--json", json);

  auto* refute = app.add_subcommand("refute", "run an irreducibility driver");
  refute->add_option("--construction", construction, "ir1|ir3")->required();
  refute->add_option("--candidate", candidate,
                     "naive|const0|const1|fig4|fig2")->required();
  refute->add_option("--n", n)->required();
  refute->add_option("--f", f)->required();
  refute->add_option("--k", k);
  refute->add_option("--oracle-mode", mode, "general|sham (ir3)");
  refute->add_option("--bound", bound);
  refute->add_option("--out", out_dir, "directory for emitted traces");
  refute->add_flag("--json", json);

  auto* allowed = app.add_subcommand("allowed", "print an oracle allowed set");
  allowed->add_option("--problem", problem, "ktag|wag");
  allowed->add_option("--k", k);
  allowed->add_option("--n", n)->required();
  allowed->add_option("--inputs", inputs, "pattern with ?")->required();
  allowed->add_option("--faulty", faulty)->required();
  allowed->add_flag("--json", json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed())
      return cmd_run(protocol, n, f, k, inputs, crashes, oracle, seed, sched,
                     bound, trace, t1, t2, json);
    if (check->parsed()) return cmd_check(trace, task, json);
    if (sweep->parsed())
      return cmd_sweep(protocol, n, f, k, trials, seed, exhaustive,
                       crash_samples, seeds, oracle, bound, t1, t2, json);
    if (refute->parsed())
      return cmd_refute(construction, candidate, n, f, k, mode, bound, out_dir,
                        json);
    if (allowed->parsed()) return cmd_allowed(problem, k, n, inputs, faulty, json);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const KtagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
