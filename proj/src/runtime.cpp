#include "ktag/runtime.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

namespace ktag {

CrashSchedule CrashSchedule::parse(const std::string& s) {
  CrashSchedule cs;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto at = item.find('@');
    if (at == std::string::npos)
      throw ParameterError("crash entry must be pid@time: " + item);
    cs.crashes.push_back({std::stoi(item.substr(0, at)),
                          std::stol(item.substr(at + 1))});
  }
  return cs;
}

std::string CrashSchedule::str() const {
  std::string s;
  for (auto& [p, t] : crashes) {
    if (!s.empty()) s += ",";
    s += std::to_string(p) + "@" + std::to_string(t);
  }
  return s;
}

std::map<ProcessId, std::vector<std::pair<int, long>>> Run::decisions() const {
  std::map<ProcessId, std::vector<std::pair<int, long>>> out;
  for (size_t i = 0; i < history.size(); ++i)
    if (history[i].kind == EventKind::Decide)
      out[history[i].pid].push_back({history[i].value, static_cast<long>(i)});
  return out;
}

std::optional<Time> Run::first_decision_time_of(ProcessId p) const {
  for (const auto& e : history)
    if (e.kind == EventKind::Decide && e.pid == p) return e.t;
  return std::nullopt;
}

std::vector<Event> Run::events_at(const std::string& loc) const {
  std::vector<Event> out;
  for (const auto& e : history)
    if (e.loc == loc) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace {

struct Copy {
  long seq;
  ProcessId from;
  Message msg;
  Time sent;
};

struct Cand {
  ProcessId pid;
  Need::Kind kind;
};

class Engine {
 public:
  Engine(const ProtocolSpec& proto, InputVector inputs, FailurePattern pattern,
         std::vector<OracleSpecInfo> oracle_specs, std::optional<int> forced,
         long bound)
      : proto_(proto),
        inputs_(std::move(inputs)),
        full_(std::move(pattern)),
        bound_(bound) {
    if (inputs_.n() != proto_.n)
      throw ParameterError("inputs length does not match n");
    for (auto& s : oracle_specs) {
      oracles_.push_back(std::make_unique<OracleInstance>(s));
      if (forced) oracles_.back()->force_answer(*forced);
      // Consultants outside the system never act; they count as crashed
      // from the start for every failure view.
      for (ProcessId c : s.consultants)
        if ((c < 1 || c > proto_.n) && !full_.is_faulty(c)) full_.set_crash(c, 0);
    }
    buf_.resize(static_cast<size_t>(proto_.n));
    for (ProcessId p = 1; p <= proto_.n; ++p) {
      autos_.push_back(proto_.make(p, inputs_.at(p)));
      queue_.push_back(p);
    }
  }

  void set_start(Time t) { now_ = t; }
  void set_seq_start(long s) { seq_next_ = s; }

  void replay(const std::vector<Event>& events) {
    for (const Event& e : events) {
      switch (e.kind) {
        case EventKind::Send: {
          Action a = autos_[idx(e.pid)]->step();
          auto* send = std::get_if<ActionSend>(&a);
          if (!send || !(send->msg == e.msg) || send->dests != e.dests)
            throw InternalInvariant("replay: send diverges at t=" +
                                    std::to_string(e.t));
          for (ProcessId d : e.dests)
            buf_[idx(d)].push_back({e.seq, e.pid, e.msg, e.t});
          seq_next_ = std::max(seq_next_, e.seq + 1);
          break;
        }
        case EventKind::Recv: {
          auto& dq = buf_[idx(e.pid)];
          auto it = std::find_if(dq.begin(), dq.end(),
                                 [&](const Copy& c) { return c.seq == e.seq; });
          if (it == dq.end())
            throw InternalInvariant("replay: receive without a buffered copy");
          Message m = it->msg;
          ProcessId from = it->from;
          dq.erase(it);
          autos_[idx(e.pid)]->on_message(from, m);
          break;
        }
        case EventKind::Query: {
          Action a = autos_[idx(e.pid)]->step();
          auto* q = std::get_if<ActionQuery>(&a);
          if (!q || q->sanctuary != e.loc || q->value != e.value)
            throw InternalInvariant("replay: query diverges at t=" +
                                    std::to_string(e.t));
          oracle(e.loc).submit_query(e.pid, e.value, e.t);
          break;
        }
        case EventKind::Answer: {
          oracle(e.loc).record_answer(e.pid, e.value, e.t, nullptr);
          autos_[idx(e.pid)]->on_answer(e.loc, e.value);
          break;
        }
        case EventKind::Decide: {
          Action a = autos_[idx(e.pid)]->step();
          auto* d = std::get_if<ActionDecide>(&a);
          if (!d || d->value != e.value)
            throw InternalInvariant("replay: decide diverges at t=" +
                                    std::to_string(e.t));
          break;
        }
      }
      hist_.push_back(e);
      now_ = e.t;
    }
  }

  void run(const SchedulerSpec& sched, AnswerRule rule) {
    rng_.seed(sched.seed);
    size_t script_pos = 0;
    quiesced_ = false;
    while (static_cast<long>(hist_.size()) < bound_) {
      Time tau = now_ + 1;
      std::optional<Cand> c = pick(sched, script_pos, tau, rule);
      if (!c) {
        quiesced_ = true;
        break;
      }
      exec(*c, tau, sched, rule);
    }
    hit_bound_ = !quiesced_ && static_cast<long>(hist_.size()) >= bound_;
  }

  Run to_run(RunMeta meta) const {
    Run r;
    r.n = proto_.n;
    r.inputs = inputs_;
    r.pattern = full_;
    for (const auto& o : oracles_) r.oracles.push_back(o->spec());
    r.history = hist_;
    r.hit_bound = hit_bound_;
    r.meta = std::move(meta);
    return r;
  }

 private:
  size_t idx(ProcessId p) const { return static_cast<size_t>(p - 1); }

  OracleInstance& oracle(const std::string& sanct) {
    for (auto& o : oracles_)
      if (o->sanctuary() == sanct) return *o;
    throw ProtocolViolation("unknown sanctuary: " + sanct);
  }

  bool has_candidate(ProcessId p, Time tau, AnswerRule rule) {
    if (!full_.can_act_at(p, tau)) return false;
    Need nd = autos_[idx(p)]->need();
    switch (nd.kind) {
      case Need::Kind::Step:
        return true;
      case Need::Kind::Receive:
        return !buf_[idx(p)].empty();
      case Need::Kind::Answer:
        return oracle(nd.sanctuary)
            .pending_answer_for(p, full_, tau, rule)
            .has_value();
    }
    return false;
  }

  std::optional<Cand> pick(const SchedulerSpec& sched, size_t& script_pos,
                           Time tau, AnswerRule rule) {
    if (sched.kind == SchedulerSpec::Kind::Script) {
      while (script_pos < sched.script.size()) {
        ProcessId p = sched.script[script_pos++];
        if (has_candidate(p, tau, rule))
          return Cand{p, autos_[idx(p)]->need().kind};
        throw ProtocolViolation("scripted process " + std::to_string(p) +
                                " has no enabled event");
      }
      // fall through to fair round-robin once the script is exhausted
    }
    if (sched.kind == SchedulerSpec::Kind::Random) {
      std::vector<ProcessId> cands;
      for (ProcessId p = 1; p <= proto_.n; ++p)
        if (has_candidate(p, tau, rule)) cands.push_back(p);
      if (cands.empty()) return std::nullopt;
      ProcessId p = cands[static_cast<size_t>(rng_() % cands.size())];
      return Cand{p, autos_[idx(p)]->need().kind};
    }
    // FairRR: first enabled process in the queue acts and moves to the back;
    // blocked processes keep their place.
    for (size_t i = 0; i < queue_.size(); ++i) {
      ProcessId p = queue_[i];
      if (has_candidate(p, tau, rule)) {
        queue_.erase(queue_.begin() + static_cast<long>(i));
        queue_.push_back(p);
        return Cand{p, autos_[idx(p)]->need().kind};
      }
    }
    return std::nullopt;
  }

  void exec(const Cand& c, Time tau, const SchedulerSpec& sched,
            AnswerRule rule) {
    try {
      exec_inner(c, tau, sched, rule);
    } catch (const ProtocolViolation& e) {
      throw ProtocolViolation(std::string(e.what()) + " (pid " +
                              std::to_string(c.pid) + " at t=" +
                              std::to_string(tau) + ")");
    }
  }

  void exec_inner(const Cand& c, Time tau, const SchedulerSpec& sched,
                  AnswerRule rule) {
    Automaton& a = *autos_[idx(c.pid)];
    switch (c.kind) {
      case Need::Kind::Step: {
        Action act = a.step();
        if (auto* s = std::get_if<ActionSend>(&act)) {
          Event e;
          e.t = tau;
          e.loc = kBufferLoc;
          e.pid = c.pid;
          e.kind = EventKind::Send;
          e.msg = s->msg;
          e.dests = s->dests;
          e.seq = seq_next_++;
          for (ProcessId d : s->dests) {
            if (d < 1 || d > proto_.n)
              throw ProtocolViolation("send to a process outside the system");
            buf_[idx(d)].push_back({e.seq, c.pid, s->msg, tau});
          }
          hist_.push_back(std::move(e));
        } else if (auto* q = std::get_if<ActionQuery>(&act)) {
          oracle(q->sanctuary).submit_query(c.pid, q->value, tau);
          Event e;
          e.t = tau;
          e.loc = q->sanctuary;
          e.pid = c.pid;
          e.kind = EventKind::Query;
          e.value = q->value;
          hist_.push_back(std::move(e));
        } else {
          auto* d = std::get_if<ActionDecide>(&act);
          Event e;
          e.t = tau;
          e.loc = kLocalLoc;
          e.pid = c.pid;
          e.kind = EventKind::Decide;
          e.value = d->value;
          hist_.push_back(std::move(e));
        }
        break;
      }
      case Need::Kind::Receive: {
        auto& dq = buf_[idx(c.pid)];
        size_t pos = 0;
        if (sched.kind == SchedulerSpec::Kind::Random && dq.size() > 1)
          pos = static_cast<size_t>(rng_() % dq.size());
        Copy cp = dq[pos];
        dq.erase(dq.begin() + static_cast<long>(pos));
        Event e;
        e.t = tau;
        e.loc = kBufferLoc;
        e.pid = c.pid;
        e.kind = EventKind::Recv;
        e.msg = cp.msg;
        e.seq = cp.seq;
        e.from = cp.from;
        hist_.push_back(std::move(e));
        a.on_message(cp.from, cp.msg);
        break;
      }
      case Need::Kind::Answer: {
        std::string sanct = a.need().sanctuary;
        OracleInstance& o = oracle(sanct);
        int v = *o.pending_answer_for(c.pid, full_, tau, rule);
        o.record_answer(c.pid, v, tau, &full_);
        Event e;
        e.t = tau;
        e.loc = sanct;
        e.pid = c.pid;
        e.kind = EventKind::Answer;
        e.value = v;
        hist_.push_back(std::move(e));
        a.on_answer(sanct, v);
        break;
      }
    }
    now_ = tau;
  }

  const ProtocolSpec& proto_;
  InputVector inputs_;
  FailurePattern full_;
  long bound_;
  std::vector<std::unique_ptr<Automaton>> autos_;
  std::vector<std::unique_ptr<OracleInstance>> oracles_;
  std::vector<std::deque<Copy>> buf_;
  std::vector<Event> hist_;
  std::deque<ProcessId> queue_;
  std::mt19937_64 rng_;
  Time now_{0};
  long seq_next_{0};
  bool quiesced_{false};
  bool hit_bound_{false};
};

std::vector<OracleSpecInfo> apply_overrides(
    const std::vector<OracleSpecInfo>& specs, std::optional<OracleMode> mode,
    std::optional<OraclePolicy> policy) {
  std::vector<OracleSpecInfo> out = specs;
  std::uint64_t salt = 0;
  for (auto& s : out) {
    if (mode) s.mode = *mode;
    if (policy) {
      s.policy = *policy;
      // One shared seed flag, distinct per-instance streams.
      if (s.policy.kind == PolicyKind::Seeded)
        s.policy.seed += salt * 0x9e3779b9ull;
    }
    ++salt;
  }
  return out;
}

}  // namespace

Run simulate(const ProtocolSpec& proto, const SimOptions& opt) {
  Engine eng(proto, opt.inputs, opt.pattern,
             apply_overrides(proto.oracles, opt.mode_override, opt.policy_override),
             opt.forced_answer, opt.step_bound);
  eng.set_start(opt.start_time);
  eng.set_seq_start(opt.seq_start);
  eng.run(opt.sched, AnswerRule::Normal);
  RunMeta meta;
  meta.protocol = proto.name;
  meta.params = proto.params;
  meta.sched = opt.sched;
  meta.step_bound = opt.step_bound;
  return eng.to_run(std::move(meta));
}

Run truncate_run(const Run& run, Time t0) {
  Run out = run;
  bool cut = false;
  while (!out.history.empty() && out.history.back().t > t0) {
    out.history.pop_back();
    cut = true;
  }
  if (cut) out.hit_bound = false;
  return out;
}

Run flip_inputs(const Run& run, const std::vector<ProcessId>& flip_set,
                int new_bit) {
  for (const auto& e : run.history)
    for (ProcessId p : flip_set)
      if (e.pid == p)
        throw ProtocolViolation("flip_inputs: process " + std::to_string(p) +
                                " takes a step in H");
  Run out = run;
  for (ProcessId p : flip_set) out.inputs.set(p, new_bit);
  return out;
}

Run resume_run(const Run& base, const ProtocolSpec& proto,
               const ResumeOptions& opt) {
  std::vector<OracleSpecInfo> specs =
      apply_overrides(base.oracles, opt.mode_override, std::nullopt);
  Engine eng(proto, base.inputs, opt.pattern, specs, opt.forced_answer,
             opt.step_bound);
  eng.replay(base.history);
  eng.run(SchedulerSpec::fair(), opt.answer_rule);
  RunMeta meta = base.meta;
  meta.step_bound = opt.step_bound;
  return eng.to_run(std::move(meta));
}

Run fair_extension(const Run& prefix, const ProtocolSpec& proto,
                   long step_bound) {
  FailurePattern f0;
  for (auto& [p, t] : prefix.pattern.crashes())
    if (p < 1 || p > prefix.n) f0.set_crash(p, t);  // keep phantom consultants
  ResumeOptions ro;
  ro.pattern = f0;
  ro.answer_rule = AnswerRule::Echo;
  ro.step_bound = step_bound;
  return resume_run(prefix, proto, ro);
}

// ---------------------------------------------------------------------------
// Structural validation
// ---------------------------------------------------------------------------

Verdict validate_run_structure(const Run& run, const ProtocolSpec& proto) {
  Verdict v;

  // R2: one event per tick, strictly increasing times, sane fields.
  {
    std::vector<long> ev;
    std::string note;
    Time prev = 0;
    for (size_t i = 0; i < run.history.size(); ++i) {
      const Event& e = run.history[i];
      if (e.t <= prev) {
        ev.push_back(static_cast<long>(i));
        note = "event times must strictly increase";
      }
      prev = e.t;
      if (e.pid < 1 || e.pid > run.n) {
        ev.push_back(static_cast<long>(i));
        note = "event by a process outside the system";
      }
    }
    v.add("R2.wellformed", ev.empty() ? Status::Pass : Status::Fail, ev, note);
  }

  // R3: every receive consumes exactly one prior matching send copy.
  {
    std::vector<long> ev;
    std::string note;
    struct SendInfo {
      ProcessId from;
      std::vector<ProcessId> dests;
      Time t;
      Message msg;
    };
    std::map<long, SendInfo> sends;
    std::map<long, std::vector<ProcessId>> consumed;
    for (size_t i = 0; i < run.history.size(); ++i) {
      const Event& e = run.history[i];
      if (e.kind == EventKind::Send) {
        sends[e.seq] = {e.pid, e.dests, e.t, e.msg};
      } else if (e.kind == EventKind::Recv) {
        auto it = sends.find(e.seq);
        if (it == sends.end()) {
          ev.push_back(static_cast<long>(i));
          note = "receive without a matching send";
          continue;
        }
        const SendInfo& s = it->second;
        bool dest_ok = std::find(s.dests.begin(), s.dests.end(), e.pid) !=
                       s.dests.end();
        auto& used = consumed[e.seq];
        bool dup = std::find(used.begin(), used.end(), e.pid) != used.end();
        if (!dest_ok || dup || s.t >= e.t || !(s.msg == e.msg) ||
            s.from != e.from) {
          ev.push_back(static_cast<long>(i));
          note = dup ? "duplicated delivery" : "receive does not match its send";
          continue;
        }
        used.push_back(e.pid);
      }
    }
    v.add("R3.channels", ev.empty() ? Status::Pass : Status::Fail, ev, note);
  }

  // R6: no event after the process's crash time.
  {
    std::vector<long> ev;
    for (size_t i = 0; i < run.history.size(); ++i) {
      const Event& e = run.history[i];
      auto ct = run.pattern.crash_time(e.pid);
      if (ct && e.t > *ct) ev.push_back(static_cast<long>(i));
    }
    v.add("R6.silence", ev.empty() ? Status::Pass : Status::Fail, ev);
  }

  // R4: replaying each process's stimuli reproduces its actions.
  {
    std::vector<long> ev;
    std::string note;
    for (ProcessId p = 1; p <= run.n; ++p) {
      std::unique_ptr<Automaton> a;
      try {
        a = proto.make(p, run.inputs.at(p));
      } catch (const KtagError& err) {
        ev.push_back(-1);
        note = err.what();
        break;
      }
      for (size_t i = 0; i < run.history.size(); ++i) {
        const Event& e = run.history[i];
        if (e.pid != p) continue;
        bool ok = true;
        try {
          switch (e.kind) {
            case EventKind::Send: {
              if (a->need().kind != Need::Kind::Step) { ok = false; break; }
              Action act = a->step();
              auto* s = std::get_if<ActionSend>(&act);
              ok = s && s->msg == e.msg && s->dests == e.dests;
              break;
            }
            case EventKind::Query: {
              if (a->need().kind != Need::Kind::Step) { ok = false; break; }
              Action act = a->step();
              auto* q = std::get_if<ActionQuery>(&act);
              ok = q && q->sanctuary == e.loc && q->value == e.value;
              break;
            }
            case EventKind::Decide: {
              if (a->need().kind != Need::Kind::Step) { ok = false; break; }
              Action act = a->step();
              auto* d = std::get_if<ActionDecide>(&act);
              ok = d && d->value == e.value;
              break;
            }
            case EventKind::Recv: {
              if (a->need().kind != Need::Kind::Receive) { ok = false; break; }
              a->on_message(e.from, e.msg);
              break;
            }
            case EventKind::Answer: {
              Need nd = a->need();
              if (nd.kind != Need::Kind::Answer || nd.sanctuary != e.loc) {
                ok = false;
                break;
              }
              a->on_answer(e.loc, e.value);
              break;
            }
          }
        } catch (const KtagError& err) {
          ok = false;
          note = err.what();
        }
        if (!ok) {
          ev.push_back(static_cast<long>(i));
          if (note.empty()) note = "event diverges from the automaton";
          break;  // this process's replay is off the rails
        }
      }
    }
    v.add("R4.replay", ev.empty() ? Status::Pass : Status::Fail, ev, note);
  }

  // R5 (operational): every correct process decided, or the step bound was
  // exhausted with work still pending.
  {
    std::vector<long> ev;
    std::string note;
    Status st = Status::Pass;
    auto dec = run.decisions();
    for (ProcessId p = 1; p <= run.n; ++p) {
      if (run.pattern.is_faulty(p)) continue;
      if (dec.count(p)) continue;
      if (run.hit_bound) {
        if (st != Status::Fail) st = Status::Inconclusive;
        note = "step bound hit with undecided correct processes";
      } else {
        st = Status::Fail;
        note = "correct process " + std::to_string(p) + " never decides";
      }
    }
    v.add("R5.progress", st, ev, note);
  }

  // R1: each sanctuary's sub-history is a legal oracle history.
  for (const auto& spec : run.oracles) {
    Verdict ov = validate_oracle_history(run.events_at(spec.sanctuary),
                                         run.pattern, spec, run.hit_bound);
    v.merge(ov, "R1[" + spec.sanctuary + "].");
  }

  return v;
}

}  // namespace ktag
