#include "ktag/protocols.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace ktag {

namespace {

std::vector<ProcessId> all_pids(int n) {
  std::vector<ProcessId> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = i + 1;
  return v;
}

// Query one sanctuary with the input, decide the answer.
class QueryDecideAuto final : public Automaton {
 public:
  QueryDecideAuto(std::string sanct, int input)
      : sanct_(std::move(sanct)), input_(input) {}

  Need need() const override {
    switch (ph_) {
      case Ph::Query:
      case Ph::Decide: return Need::step();
      case Ph::WaitAns: return Need::answer(sanct_);
      case Ph::Drain: return Need::receive();
    }
    return Need::step();
  }
  Action step() override {
    if (ph_ == Ph::Query) {
      ph_ = Ph::WaitAns;
      return ActionQuery{sanct_, input_};
    }
    ph_ = Ph::Drain;
    return ActionDecide{answer_};
  }
  void on_message(ProcessId, const Message&) override {}
  void on_answer(const std::string&, int v) override {
    answer_ = v;
    ph_ = Ph::Decide;
  }

 private:
  enum class Ph { Query, WaitAns, Decide, Drain } ph_{Ph::Query};
  std::string sanct_;
  int input_;
  int answer_{-1};
};

class ConstAuto final : public Automaton {
 public:
  explicit ConstAuto(int v) : v_(v) {}
  Need need() const override {
    return done_ ? Need::receive() : Need::step();
  }
  Action step() override {
    done_ = true;
    return ActionDecide{v_};
  }
  void on_message(ProcessId, const Message&) override {}
  void on_answer(const std::string&, int) override {}

 private:
  int v_;
  bool done_{false};
};

class Fig1Auto final : public Automaton {
 public:
  Fig1Auto(int n, int f, std::string sanct, int input)
      : n_(n), f_(f), sanct_(std::move(sanct)), input_(input) {}

  Need need() const override {
    switch (ph_) {
      case Ph::SendVal:
      case Ph::Query:
      case Ph::Decide: return Need::step();
      case Ph::Collect:
      case Ph::Drain: return Need::receive();
      case Ph::WaitAns: return Need::answer(sanct_);
    }
    return Need::step();
  }
  Action step() override {
    switch (ph_) {
      case Ph::SendVal:
        ph_ = Ph::Collect;
        return ActionSend{{"V", {input_}}, all_pids(n_)};
      case Ph::Query:
        ph_ = Ph::WaitAns;
        return ActionQuery{sanct_, x_};
      default:
        ph_ = Ph::Drain;
        return ActionDecide{answer_};
    }
  }
  void on_message(ProcessId from, const Message& m) override {
    if (m.tag != "V" || seen_.count(from)) return;
    seen_[from] = m.vals.at(0);
    if (ph_ == Ph::Collect && static_cast<int>(seen_.size()) >= n_ - f_) {
      x_ = 1;
      for (auto& [p, v] : seen_) x_ = std::min(x_, v);
      ph_ = Ph::Query;
    }
  }
  void on_answer(const std::string&, int v) override {
    answer_ = v;
    ph_ = Ph::Decide;
  }

 private:
  enum class Ph { SendVal, Collect, Query, WaitAns, Decide, Drain } ph_{Ph::SendVal};
  int n_, f_;
  std::string sanct_;
  int input_;
  int x_{0};
  int answer_{-1};
  std::map<ProcessId, int> seen_;
};

// Message value 2 encodes the "?" proposal.
constexpr int kUnknown = 2;

class Fig2Auto final : public Automaton {
 public:
  Fig2Auto(int n, int f, std::string sanct, int input)
      : n_(n), f_(f), sanct_(std::move(sanct)), input_(input), x_(input) {}

  Need need() const override {
    switch (ph_) {
      case Ph::Query1:
      case Ph::Query2:
      case Ph::DecideV:
      case Ph::SendR:
      case Ph::SendP:
      case Ph::DecideW: return Need::step();
      case Ph::Wait1:
      case Ph::Wait2: return Need::answer(sanct_);
      case Ph::CollectR:
      case Ph::CollectP:
      case Ph::Drain: return Need::receive();
    }
    return Need::step();
  }

  Action step() override {
    switch (ph_) {
      case Ph::Query1:
        ph_ = Ph::Wait1;
        return ActionQuery{sanct_, input_};
      case Ph::Query2:
        ph_ = Ph::Wait2;
        return ActionQuery{sanct_, 1};
      case Ph::DecideV:
        ph_ = Ph::Drain;
        return ActionDecide{v_};
      case Ph::SendR: {
        // Capture before the recheck: it may advance the round.
        Message m{"R", {x_, r_}};
        ph_ = Ph::CollectR;
        check_round_r();
        return ActionSend{m, all_pids(n_)};
      }
      case Ph::SendP: {
        Message m{"P", {proposal_, r_}};
        ph_ = Ph::CollectP;
        check_round_p();
        return ActionSend{m, all_pids(n_)};
      }
      case Ph::DecideW:
        end_round();
        return ActionDecide{w_};
      default:
        return ActionDecide{-1};  // unreachable
    }
  }

  void on_message(ProcessId from, const Message& m) override {
    if (m.tag == "R")
      rmsgs_[m.vals.at(1)].emplace(from, m.vals.at(0));
    else if (m.tag == "P")
      pmsgs_[m.vals.at(1)].emplace(from, m.vals.at(0));
    if (ph_ == Ph::CollectR) check_round_r();
    else if (ph_ == Ph::CollectP) check_round_p();
  }

  void on_answer(const std::string&, int v) override {
    if (ph_ == Ph::Wait1) {
      v_ = v;
      ph_ = Ph::Query2;
    } else if (ph_ == Ph::Wait2) {
      ph_ = (v == 1) ? Ph::DecideV : Ph::SendR;
    }
  }

 private:
  enum class Ph {
    Query1, Wait1, Query2, Wait2, DecideV,
    SendR, CollectR, SendP, CollectP, DecideW, Drain
  } ph_{Ph::Query1};

  void check_round_r() {
    if (ph_ != Ph::CollectR) return;
    auto& got = rmsgs_[r_];
    if (static_cast<int>(got.size()) < n_ - f_) return;
    int zeros = 0;
    bool all_one = true;
    for (auto& [p, v] : got) {
      zeros += (v == 0);
      all_one = all_one && (v == 1);
    }
    if (zeros >= f_ + 1) proposal_ = 0;
    else if (all_one) proposal_ = 1;
    else proposal_ = kUnknown;
    ph_ = Ph::SendP;
  }

  void check_round_p() {
    if (ph_ != Ph::CollectP) return;
    auto& got = pmsgs_[r_];
    if (static_cast<int>(got.size()) < n_ - f_) return;
    int c0 = 0, c1 = 0;
    for (auto& [p, v] : got) {
      c0 += (v == 0);
      c1 += (v == 1);
    }
    if (c0 > 0 && c1 > 0)
      throw InternalInvariant("fig2: 0 and 1 proposed in one round");
    if (c0 >= f_ + 1 || c1 >= f_ + 1) {
      w_ = (c0 >= f_ + 1) ? 0 : 1;
      x_ = w_;
      ph_ = Ph::DecideW;
      return;
    }
    if (c0 > 0) x_ = 0;
    else if (c1 > 0) x_ = 1;
    else x_ = 0;
    end_round();
  }

  // Advance past round r_; decided processes participate for one more full
  // round so late deciders still receive their quorum, then drain.
  void end_round() {
    if (ph_ == Ph::DecideW && first_decide_round_ < 0) first_decide_round_ = r_;
    if (first_decide_round_ >= 0 && r_ >= first_decide_round_ + 1) {
      ph_ = Ph::Drain;
      return;
    }
    r_ += 1;
    ph_ = Ph::SendR;
  }

  int n_, f_;
  std::string sanct_;
  int input_;
  int x_;
  int v_{-1};
  int r_{1};
  int w_{-1};
  int proposal_{kUnknown};
  int first_decide_round_{-1};
  std::map<int, std::map<ProcessId, int>> rmsgs_;  // round -> sender -> value
  std::map<int, std::map<ProcessId, int>> pmsgs_;
};

class Fig3Auto final : public Automaton {
 public:
  Fig3Auto(int big_n, ProcessId me, int input, std::vector<std::string> sancts,
           bool use_max)
      : big_n_(big_n), me_(me), input_(input), sancts_(std::move(sancts)),
        use_max_(use_max) {
    advance_l();
  }

  Need need() const override {
    switch (ph_) {
      case Ph::Query:
      case Ph::SendW:
      case Ph::Decide: return Need::step();
      case Ph::WaitAns: return Need::answer(sancts_[static_cast<size_t>(l_ - 1)]);
      case Ph::Collect:
      case Ph::Drain: return Need::receive();
    }
    return Need::step();
  }

  Action step() override {
    switch (ph_) {
      case Ph::Query:
        ph_ = Ph::WaitAns;
        return ActionQuery{sancts_[static_cast<size_t>(l_ - 1)], input_};
      case Ph::SendW: {
        int l = l_;
        l_ += 1;
        advance_l();
        return ActionSend{{"W", {l, known_.at(l)}}, all_pids(big_n_)};
      }
      default: {
        int d = known_.begin()->second;
        for (auto& [l, w] : known_) d = use_max_ ? std::max(d, w) : std::min(d, w);
        ph_ = Ph::Drain;
        return ActionDecide{d};
      }
    }
  }

  void on_message(ProcessId, const Message& m) override {
    if (m.tag != "W") return;
    int l = m.vals.at(0), w = m.vals.at(1);
    auto it = known_.find(l);
    if (it != known_.end() && it->second != w)
      throw InternalInvariant("fig3: conflicting oracle values relayed");
    known_[l] = w;
    if (ph_ == Ph::Collect && static_cast<int>(known_.size()) == big_n_)
      ph_ = Ph::Decide;
  }

  void on_answer(const std::string&, int v) override {
    known_[l_] = v;
    ph_ = Ph::SendW;
  }

 private:
  // Skip our own excluded oracle; after the last index, wait for the rest.
  void advance_l() {
    if (l_ == me_) l_ += 1;
    if (l_ > big_n_) {
      ph_ = static_cast<int>(known_.size()) == big_n_ ? Ph::Decide : Ph::Collect;
    } else {
      ph_ = Ph::Query;
    }
  }

  enum class Ph { Query, WaitAns, SendW, Collect, Decide, Drain } ph_{Ph::Query};
  int big_n_;
  ProcessId me_;
  int input_;
  std::vector<std::string> sancts_;
  bool use_max_;
  int l_{1};
  std::map<int, int> known_;
};

class Fig4Auto final : public Automaton {
 public:
  Fig4Auto(int n, int f, std::string sanct, int input)
      : n_(n), f_(f), sanct_(std::move(sanct)), input_(input) {}

  Need need() const override {
    switch (ph_) {
      case Ph::Query1:
      case Ph::Query2:
      case Ph::DecideV:
      case Ph::SendVal:
      case Ph::DecideX: return Need::step();
      case Ph::Wait1:
      case Ph::Wait2: return Need::answer(sanct_);
      case Ph::Collect:
      case Ph::Drain: return Need::receive();
    }
    return Need::step();
  }
  Action step() override {
    switch (ph_) {
      case Ph::Query1:
        ph_ = Ph::Wait1;
        return ActionQuery{sanct_, input_};
      case Ph::Query2:
        ph_ = Ph::Wait2;
        return ActionQuery{sanct_, 1};
      case Ph::DecideV:
        ph_ = Ph::Drain;
        return ActionDecide{v_};
      case Ph::SendVal:
        ph_ = Ph::Collect;
        check_collect();
        return ActionSend{{"V", {input_}}, all_pids(n_)};
      default:
        ph_ = Ph::Drain;
        return ActionDecide{any_zero_ ? 0 : 1};
    }
  }
  void on_message(ProcessId from, const Message& m) override {
    if (m.tag != "V" || seen_.count(from)) return;
    seen_[from] = m.vals.at(0);
    if (ph_ == Ph::Collect) check_collect();
  }
  void on_answer(const std::string&, int v) override {
    if (ph_ == Ph::Wait1) {
      v_ = v;
      ph_ = Ph::Query2;
    } else if (ph_ == Ph::Wait2) {
      ph_ = (v == 1) ? Ph::DecideV : Ph::SendVal;
    }
  }

 private:
  void check_collect() {
    if (ph_ != Ph::Collect) return;
    if (static_cast<int>(seen_.size()) < n_ - f_) return;
    any_zero_ = false;
    for (auto& [p, v] : seen_) any_zero_ = any_zero_ || (v == 0);
    ph_ = Ph::DecideX;
  }

  enum class Ph {
    Query1, Wait1, Query2, Wait2, DecideV, SendVal, Collect, DecideX, Drain
  } ph_{Ph::Query1};
  int n_, f_;
  std::string sanct_;
  int input_;
  int v_{-1};
  bool any_zero_{false};
  std::map<ProcessId, int> seen_;
};

class TrivialAuto final : public Automaton {
 public:
  explicit TrivialAuto(int input) : input_(input) {}
  Need need() const override { return done_ ? Need::receive() : Need::step(); }
  Action step() override {
    done_ = true;
    return ActionDecide{input_};
  }
  void on_message(ProcessId, const Message&) override {}
  void on_answer(const std::string&, int) override {}

 private:
  int input_;
  bool done_{false};
};

void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError(what);
}

}  // namespace

ProtocolSpec make_direct(int n, int f, int k) {
  require(n >= 1 && 1 <= k && k <= n && 1 <= f && f <= n - 1,
          "direct: need 1 <= k <= n and 1 <= f <= n-1");
  ProtocolSpec p;
  p.name = "direct";
  p.n = n;
  p.params = {{"n", n}, {"f", f}, {"k", k}};
  p.solves = {ProblemSpec::ktag(k, n), f};
  OracleSpecInfo o;
  o.sanctuary = "o1";
  o.consultants = all_pids(n + 1);  // the (n+1)-th consultant never queries
  o.problem = ProblemSpec::ktag(k + 1, n + 1);
  o.f = f + 1;
  p.oracles = {o};
  std::string sanct = o.sanctuary;
  p.make = [sanct](ProcessId, int input) {
    return std::make_unique<QueryDecideAuto>(sanct, input);
  };
  return p;
}

ProtocolSpec make_fig1(int n, int f) {
  require(1 <= f && f <= n - 1, "fig1: need 1 <= f <= n-1");
  ProtocolSpec p;
  p.name = "fig1";
  p.n = n;
  p.params = {{"n", n}, {"f", f}};
  p.solves = {ProblemSpec::ktag(f + 1, n), f};
  OracleSpecInfo o;
  o.sanctuary = "o1";
  o.consultants = all_pids(n);
  o.problem = ProblemSpec::cons(n);
  o.f = f;
  p.oracles = {o};
  p.make = [n, f, sanct = o.sanctuary](ProcessId, int input) {
    return std::make_unique<Fig1Auto>(n, f, sanct, input);
  };
  return p;
}

ProtocolSpec make_fig2(int n, int f) {
  require(1 <= f && f <= n - 1, "fig2: need 1 <= f <= n-1");
  ProtocolSpec p;
  p.name = "fig2";
  p.n = n;
  p.params = {{"n", n}, {"f", f}};
  p.solves = {ProblemSpec::ktag(f + 1, n), f};
  OracleSpecInfo o;
  o.sanctuary = "o1";
  o.consultants = all_pids(n);
  o.problem = ProblemSpec::ktag(f, n);
  o.f = f;
  o.mode = OracleMode::Consistent;
  p.oracles = {o};
  p.make = [n, f, sanct = o.sanctuary](ProcessId, int input) {
    return std::make_unique<Fig2Auto>(n, f, sanct, input);
  };
  return p;
}

ProtocolSpec make_fig3(int n, int f, int k, bool use_max) {
  require(1 <= f && f <= n - 1 && 1 <= k && k <= n,
          "fig3: need 1 <= f <= n-1 and 1 <= k <= n");
  const int big_n = n + 1;
  ProtocolSpec p;
  p.name = use_max ? "fig3max" : "fig3min";
  p.n = big_n;
  p.params = {{"n", n}, {"f", f}, {"k", k}};
  p.solves = {ProblemSpec::ktag(use_max ? k + 1 : k, big_n), f};
  std::vector<std::string> sancts;
  for (int l = 1; l <= big_n; ++l) {
    OracleSpecInfo o;
    o.sanctuary = "o" + std::to_string(l);
    std::vector<ProcessId> members;
    for (int q = 1; q <= big_n; ++q)
      if (q != l) members.push_back(q);
    o.consultants = members;
    o.problem = ProblemSpec::ktag(k, members);
    o.f = f;
    p.oracles.push_back(o);
    sancts.push_back(o.sanctuary);
  }
  p.make = [big_n, sancts, use_max](ProcessId pid, int input) {
    return std::make_unique<Fig3Auto>(big_n, pid, input, sancts, use_max);
  };
  return p;
}

ProtocolSpec make_fig4(int n, int f) {
  require(1 <= f && f <= n - 1, "fig4: need 1 <= f <= n-1");
  ProtocolSpec p;
  p.name = "fig4";
  p.n = n;
  p.params = {{"n", n}, {"f", f}};
  p.solves = {ProblemSpec::ktag(f + 1, n), f};
  OracleSpecInfo o;
  o.sanctuary = "o1";
  o.consultants = all_pids(n);
  o.problem = ProblemSpec::ktag(f, n);
  o.f = f;
  o.mode = OracleMode::Sham;
  p.oracles = {o};
  p.make = [n, f, sanct = o.sanctuary](ProcessId, int input) {
    return std::make_unique<Fig4Auto>(n, f, sanct, input);
  };
  return p;
}

ProtocolSpec make_noop(const TaskSpec& t1, const TaskSpec& t2) {
  GeneralizationResult g = is_generalization(t1, t2);
  if (!g.holds) {
    std::string msg = "noop: " + t2.label() + " is not a generalization of " +
                      t1.label() + " (" + g.reason;
    if (g.witness)
      msg += "; witness fc=" + std::to_string(g.witness->faulty_count) +
             " inputs=" + g.witness->inputs.str(t1.problem.members) +
             " decision=" + std::to_string(g.witness->decision);
    msg += ")";
    throw ParameterError(msg);
  }
  const int n = t1.problem.n();
  ProtocolSpec p;
  p.name = "noop";
  p.n = n;
  p.params = {{"n", n},
              {"f", t1.f},
              {"k", t1.problem.kind == ProblemKind::KTag ? t1.problem.k : 0},
              {"wag1", t1.problem.kind == ProblemKind::WAg ? 1 : 0},
              {"k2", t2.problem.kind == ProblemKind::KTag ? t2.problem.k : 0},
              {"wag2", t2.problem.kind == ProblemKind::WAg ? 1 : 0},
              {"f2", t2.f}};
  p.solves = t1;
  OracleSpecInfo o;
  o.sanctuary = "o1";
  o.consultants = t2.problem.members;
  o.problem = t2.problem;
  o.f = t2.f;
  p.oracles = {o};
  p.make = [sanct = o.sanctuary](ProcessId, int input) {
    return std::make_unique<QueryDecideAuto>(sanct, input);
  };
  return p;
}

ProtocolSpec make_naive_cons_candidate(int n, int f, int k) {
  require(1 <= k && k <= f && f <= n - 1, "naive: need 1 <= k <= f <= n-1");
  ProtocolSpec p;
  p.name = "naive";
  p.n = n;
  p.params = {{"n", n}, {"f", f}, {"k", k}};
  p.solves = {ProblemSpec::ktag(k, n), f};
  OracleSpecInfo o;
  o.sanctuary = "o1";
  o.consultants = all_pids(n);
  o.problem = ProblemSpec::cons(n);
  o.f = n - 1;  // wait-free
  p.oracles = {o};
  p.make = [sanct = o.sanctuary](ProcessId, int input) {
    return std::make_unique<QueryDecideAuto>(sanct, input);
  };
  return p;
}

ProtocolSpec make_const_candidate(int n, int f, int k, int value) {
  ProtocolSpec p = make_naive_cons_candidate(n, f, k);
  p.name = "const" + std::to_string(value);
  p.params["value"] = value;
  p.make = [value](ProcessId, int) { return std::make_unique<ConstAuto>(value); };
  return p;
}

ProtocolSpec make_trivial(int n) {
  ProtocolSpec p;
  p.name = "trivial";
  p.n = n;
  p.params = {{"n", n}, {"f", 0}};
  p.solves = {ProblemSpec::cons(n), 0};
  p.make = [](ProcessId, int input) { return std::make_unique<TrivialAuto>(input); };
  return p;
}

ProtocolSpec make_protocol_from_meta(const std::string& name,
                                     const std::map<std::string, int>& params) {
  auto get = [&](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end())
      throw ParameterError("trace header misses parameter " + key);
    return it->second;
  };
  if (name == "direct") return make_direct(get("n"), get("f"), get("k"));
  if (name == "fig1") return make_fig1(get("n"), get("f"));
  if (name == "fig2") return make_fig2(get("n"), get("f"));
  if (name == "fig3max") return make_fig3(get("n"), get("f"), get("k"), true);
  if (name == "fig3min") return make_fig3(get("n"), get("f"), get("k"), false);
  if (name == "fig4") return make_fig4(get("n"), get("f"));
  if (name == "naive") return make_naive_cons_candidate(get("n"), get("f"), get("k"));
  if (name == "const0" || name == "const1")
    return make_const_candidate(get("n"), get("f"), get("k"), get("value"));
  if (name == "trivial") return make_trivial(get("n"));
  if (name == "noop") {
    int n = get("n");
    TaskSpec t1{get("wag1") ? ProblemSpec::wag(n)
                            : ProblemSpec::ktag(get("k"), n),
                get("f")};
    TaskSpec t2{get("wag2") ? ProblemSpec::wag(n)
                            : ProblemSpec::ktag(get("k2"), n),
                get("f2")};
    return make_noop(t1, t2);
  }
  throw ParameterError("unknown protocol: " + name);
}

}  // namespace ktag
