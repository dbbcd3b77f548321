#include "ktag/trace.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ktag {

using json = nlohmann::ordered_json;

namespace {

json problem_to_json(const ProblemSpec& p) {
  json j;
  j["kind"] = p.kind == ProblemKind::KTag ? "ktag" : "wag";
  j["k"] = p.k;
  j["members"] = p.members;
  return j;
}

ProblemSpec problem_from_json(const json& j) {
  std::vector<ProcessId> members = j.at("members").get<std::vector<ProcessId>>();
  if (j.at("kind") == "wag") return ProblemSpec::wag(members);
  return ProblemSpec::ktag(j.at("k").get<int>(), members);
}

json oracle_to_json(const OracleSpecInfo& o) {
  json j;
  j["sanctuary"] = o.sanctuary;
  j["consultants"] = o.consultants;
  j["problem"] = problem_to_json(o.problem);
  j["f"] = o.f;
  j["mode"] = oracle_mode_str(o.mode);
  j["policy"] = {{"kind", policy_kind_str(o.policy.kind)}, {"seed", o.policy.seed}};
  return j;
}

OracleSpecInfo oracle_from_json(const json& j) {
  OracleSpecInfo o;
  o.sanctuary = j.at("sanctuary").get<std::string>();
  o.consultants = j.at("consultants").get<std::vector<ProcessId>>();
  o.problem = problem_from_json(j.at("problem"));
  o.f = j.at("f").get<int>();
  o.mode = oracle_mode_from(j.at("mode").get<std::string>());
  o.policy.kind = policy_kind_from(j.at("policy").at("kind").get<std::string>());
  o.policy.seed = j.at("policy").at("seed").get<std::uint64_t>();
  return o;
}

const char* sched_kind_str(SchedulerSpec::Kind k) {
  switch (k) {
    case SchedulerSpec::Kind::FairRR: return "fair";
    case SchedulerSpec::Kind::Random: return "random";
    case SchedulerSpec::Kind::Script: return "script";
  }
  return "?";
}

SchedulerSpec::Kind sched_kind_from(const std::string& s) {
  if (s == "fair") return SchedulerSpec::Kind::FairRR;
  if (s == "random") return SchedulerSpec::Kind::Random;
  if (s == "script") return SchedulerSpec::Kind::Script;
  throw ParameterError("unknown scheduler kind: " + s);
}

}  // namespace

std::string trace_to_jsonl(const Run& run) {
  std::ostringstream out;
  json h;
  h["type"] = "header";
  h["protocol"] = run.meta.protocol;
  h["params"] = run.meta.params;
  h["n"] = run.n;
  h["inputs"] = run.inputs.str();
  json crashes = json::array();
  for (auto& [p, t] : run.pattern.crashes()) crashes.push_back({p, t});
  h["crashes"] = crashes;
  json oracles = json::array();
  for (const auto& o : run.oracles) oracles.push_back(oracle_to_json(o));
  h["oracles"] = oracles;
  h["sched"] = {{"kind", sched_kind_str(run.meta.sched.kind)},
                {"seed", run.meta.sched.seed}};
  h["bound"] = run.meta.step_bound;
  h["hit_bound"] = run.hit_bound;
  out << h.dump() << "\n";

  for (const auto& e : run.history) {
    json j;
    j["type"] = "event";
    j["t"] = e.t;
    j["loc"] = e.loc;
    j["pid"] = e.pid;
    j["kind"] = std::string(1, event_kind_char(e.kind));
    switch (e.kind) {
      case EventKind::Send:
        j["seq"] = e.seq;
        j["tag"] = e.msg.tag;
        j["vals"] = e.msg.vals;
        j["dests"] = e.dests;
        break;
      case EventKind::Recv:
        j["seq"] = e.seq;
        j["from"] = e.from;
        j["tag"] = e.msg.tag;
        j["vals"] = e.msg.vals;
        break;
      default:
        j["value"] = e.value;
        break;
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

void write_trace(const Run& run, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw KtagError("cannot open trace file for writing: " + path);
  f << trace_to_jsonl(run);
}

Run trace_from_jsonl(const std::string& text) {
  Run run;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      have_header = true;
      run.meta.protocol = j.at("protocol").get<std::string>();
      run.meta.params = j.at("params").get<std::map<std::string, int>>();
      run.n = j.at("n").get<int>();
      run.inputs = InputVector::from_string(j.at("inputs").get<std::string>());
      for (const auto& c : j.at("crashes"))
        run.pattern.set_crash(c.at(0).get<ProcessId>(), c.at(1).get<Time>());
      for (const auto& o : j.at("oracles"))
        run.oracles.push_back(oracle_from_json(o));
      run.meta.sched.kind =
          sched_kind_from(j.at("sched").at("kind").get<std::string>());
      run.meta.sched.seed = j.at("sched").at("seed").get<std::uint64_t>();
      run.meta.step_bound = j.at("bound").get<long>();
      run.hit_bound = j.at("hit_bound").get<bool>();
      continue;
    }
    if (type != "event") throw ParameterError("unknown trace record: " + type);
    Event e;
    e.t = j.at("t").get<Time>();
    e.loc = j.at("loc").get<std::string>();
    e.pid = j.at("pid").get<ProcessId>();
    std::string k = j.at("kind").get<std::string>();
    if (k == "S") {
      e.kind = EventKind::Send;
      e.seq = j.at("seq").get<long>();
      e.msg.tag = j.at("tag").get<std::string>();
      e.msg.vals = j.at("vals").get<std::vector<int>>();
      e.dests = j.at("dests").get<std::vector<ProcessId>>();
    } else if (k == "R") {
      e.kind = EventKind::Recv;
      e.seq = j.at("seq").get<long>();
      e.from = j.at("from").get<ProcessId>();
      e.msg.tag = j.at("tag").get<std::string>();
      e.msg.vals = j.at("vals").get<std::vector<int>>();
    } else if (k == "Q" || k == "A" || k == "D") {
      e.kind = k == "Q" ? EventKind::Query
                        : (k == "A" ? EventKind::Answer : EventKind::Decide);
      e.value = j.at("value").get<int>();
      if (k == "D" && e.loc != kLocalLoc)
        throw ParameterError("decide events live at the local location");
    } else {
      throw ParameterError("unknown event kind: " + k);
    }
    run.history.push_back(std::move(e));
  }
  if (!have_header) throw ParameterError("trace has no header record");
  return run;
}

Run read_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw KtagError("cannot open trace file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return trace_from_jsonl(ss.str());
}

std::string verdict_to_json(const Verdict& v) {
  json j;
  j["overall"] = status_str(v.overall());
  json conds = json::array();
  for (const auto& c : v.conditions) {
    json cj;
    cj["name"] = c.name;
    cj["status"] = status_str(c.status);
    if (!c.evidence.empty()) cj["evidence"] = c.evidence;
    if (!c.note.empty()) cj["note"] = c.note;
    conds.push_back(cj);
  }
  j["conditions"] = conds;
  return j.dump();
}

}  // namespace ktag
