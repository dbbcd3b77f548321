#include "ktag/oracle.hpp"

#include <algorithm>

namespace ktag {

const char* oracle_mode_str(OracleMode m) {
  switch (m) {
    case OracleMode::General: return "general";
    case OracleMode::Consistent: return "consistent";
    case OracleMode::Sham: return "sham";
  }
  return "?";
}

const char* policy_kind_str(PolicyKind k) {
  switch (k) {
    case PolicyKind::Prefer0: return "prefer0";
    case PolicyKind::Prefer1: return "prefer1";
    case PolicyKind::Seeded: return "seeded";
  }
  return "?";
}

OracleMode oracle_mode_from(const std::string& s) {
  if (s == "general") return OracleMode::General;
  if (s == "consistent") return OracleMode::Consistent;
  if (s == "sham") return OracleMode::Sham;
  throw ParameterError("unknown oracle mode: " + s);
}

PolicyKind policy_kind_from(const std::string& s) {
  if (s == "prefer0") return PolicyKind::Prefer0;
  if (s == "prefer1") return PolicyKind::Prefer1;
  if (s == "seeded") return PolicyKind::Seeded;
  throw ParameterError("unknown answer policy: " + s);
}

OracleInstance::OracleInstance(OracleSpecInfo spec)
    : spec_(std::move(spec)), rng_(spec_.policy.seed) {
  if (spec_.mode == OracleMode::Consistent &&
      spec_.problem.kind != ProblemKind::KTag)
    throw ParameterError("consistent mode is restricted to kTAg oracles");
  if (spec_.f < 0 || spec_.f > spec_.problem.n() - 1)
    throw ParameterError("oracle resiliency degree out of range");
}

const Consultation* OracleInstance::consultation_of(ProcessId p) const {
  for (const auto& c : consultations_)
    if (c.has_query(p) && !c.has_answer(p)) return &c;
  return nullptr;
}

Consultation* OracleInstance::consultation_of(ProcessId p) {
  for (auto& c : consultations_)
    if (c.has_query(p) && !c.has_answer(p)) return &c;
  return nullptr;
}

void OracleInstance::submit_query(ProcessId p, int value, Time t) {
  if (std::find(spec_.consultants.begin(), spec_.consultants.end(), p) ==
      spec_.consultants.end())
    throw ProtocolViolation("query from a non-consultant at " + spec_.sanctuary);
  if (consultation_of(p))
    throw ProtocolViolation("duplicate query without an answer at " +
                            spec_.sanctuary);
  // Consultation index = answers received so far + 1.
  int answered = 0;
  for (const auto& c : consultations_) answered += c.has_answer(p) ? 1 : 0;
  int idx = answered + 1;
  while (static_cast<int>(consultations_.size()) < idx) {
    Consultation c;
    c.index = static_cast<int>(consultations_.size()) + 1;
    consultations_.push_back(std::move(c));
  }
  Consultation& c = consultations_[static_cast<size_t>(idx - 1)];
  if (c.has_query(p))
    throw ProtocolViolation("second query in one consultation at " +
                            spec_.sanctuary);
  c.queries.push_back({p, {value, t}});
}

int OracleInstance::failure_view(const FailurePattern& full, Time now) const {
  if (spec_.mode == OracleMode::Sham)
    return full.faulty_count_within_at(spec_.consultants, now);
  return full.faulty_count_within(spec_.consultants);
}

DecisionSet OracleInstance::allowed_now(const Consultation& c,
                                        const FailurePattern& full,
                                        Time now) const {
  DecisionSet allowed =
      oracle_allowed(spec_.problem, failure_view(full, now), c.query_vector());
  if (spec_.mode == OracleMode::Consistent) {
    PartialVector w = c.query_vector();
    for (const auto& [w2, d2] : memory_) {
      if (w.comparable_with(w2)) {
        DecisionSet pin{d2 == 0, d2 == 1};
        allowed = allowed.intersect(pin);
      }
    }
  }
  return allowed;
}

int OracleInstance::pick_by_policy(const DecisionSet& allowed) const {
  PolicyKind kind = spec_.policy.kind;
  if (kind == PolicyKind::Seeded) {
    if (allowed.zero && allowed.one) return static_cast<int>(rng_() & 1u);
    return allowed.zero ? 0 : 1;
  }
  if (kind == PolicyKind::Prefer0) return allowed.zero ? 0 : 1;
  return allowed.one ? 1 : 0;
}

// Consistent mode cannot follow a per-vector preference: a committed value
// binds every consultation whose final vector ends up comparable, and those
// vectors are not known yet. Deciding from the correct consultants' entries
// alone keeps comparable consultations equal, because comparable final
// vectors contain the same correct entries.
int OracleInstance::consistent_value(const Consultation& c,
                                     const FailurePattern& full,
                                     Time now) const {
  int fc = failure_view(full, now);
  if (fc >= spec_.problem.k) return 0;
  for (const auto& [p, vt] : c.queries)
    if (vt.first == 0 && !full.is_faulty(p)) return 0;
  return 1;
}

std::optional<int> OracleInstance::committable_value(const Consultation& c,
                                                     const FailurePattern& full,
                                                     Time now) const {
  DecisionSet allowed = allowed_now(c, full, now);
  if (allowed.empty()) return std::nullopt;  // wait
  int quorum = static_cast<int>(spec_.consultants.size()) - spec_.f;
  if (c.query_count() < quorum) return std::nullopt;
  if (spec_.mode == OracleMode::Consistent) {
    // Defer past quorum until every correct consultant has queried, so the
    // commit value can be read off the correct entries.
    for (ProcessId p : spec_.consultants)
      if (!full.is_faulty(p) && !c.has_query(p)) return std::nullopt;
  }
  if (forced_) {
    if (!allowed.contains(*forced_))
      throw InternalInvariant("forced answer " + std::to_string(*forced_) +
                              " not in allowed set " + allowed.str() + " at " +
                              spec_.sanctuary);
    return *forced_;
  }
  if (spec_.mode == OracleMode::Consistent) {
    int v = consistent_value(c, full, now);
    if (!allowed.contains(v))
      throw InternalInvariant("consistent choice left the allowed set at " +
                              spec_.sanctuary);
    return v;
  }
  return pick_by_policy(allowed);
}

std::optional<int> OracleInstance::pending_answer_for(ProcessId p,
                                                      const FailurePattern& full,
                                                      Time now,
                                                      AnswerRule rule) const {
  const Consultation* c = consultation_of(p);
  if (!c) return std::nullopt;
  if (c->committed) return *c->committed;
  if (rule == AnswerRule::Echo) {
    for (auto& [q, vt] : c->queries)
      if (q == p) return vt.first;
    return std::nullopt;
  }
  // Commits happen in consultation order; an uncommitted consultation with
  // queriers is necessarily the earliest such.
  return committable_value(*c, full, now);
}

void OracleInstance::record_answer(ProcessId p, int value, Time t,
                                   const FailurePattern* full) {
  Consultation* c = consultation_of(p);
  if (!c) throw ProtocolViolation("answer without a pending query at " +
                                  spec_.sanctuary);
  if (!c->committed) {
    c->committed = value;
    c->commit_time = t;
    c->commit_vector = c->query_vector();
    if (spec_.mode == OracleMode::Consistent)
      memory_.push_back({c->commit_vector, value});
  }
  if (*c->committed != value)
    throw InternalInvariant("answer diverges from committed value at " +
                            spec_.sanctuary);
  if (full) {
    // The committed value stays allowed as the vector grows and time passes
    // (allowed sets are monotone in both); asserted, not assumed.
    DecisionSet allowed =
        oracle_allowed(spec_.problem, failure_view(*full, t), c->query_vector());
    if (!allowed.contains(value))
      throw InternalInvariant("committed value left the allowed set at " +
                              spec_.sanctuary);
  }
  c->answers.push_back({p, {value, t}});
}

std::vector<std::pair<ProcessId, int>> OracleInstance::poll_answers(
    const FailurePattern& full, Time now) {
  std::vector<std::pair<ProcessId, int>> out;
  for (auto& c : consultations_) {
    bool pending = false;
    for (auto& [p, vt] : c.queries)
      if (!c.has_answer(p)) pending = true;
    if (!pending) continue;
    // Earliest consultation with unanswered queriers.
    std::optional<int> v =
        c.committed ? c.committed : committable_value(c, full, now);
    if (!v) return out;  // wait
    for (auto& [p, vt] : c.queries) {
      if (!c.has_answer(p)) {
        record_answer(p, *v, now, &full);
        out.push_back({p, *v});
      }
    }
    return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// History validator
// ---------------------------------------------------------------------------

namespace {

struct ConsRebuild {
  PartialVector vector_so_far;
  std::vector<std::pair<ProcessId, std::pair<int, Time>>> queries;
  std::vector<std::pair<ProcessId, std::pair<int, Time>>> answers;
  std::optional<int> committed;
};

}  // namespace

Verdict validate_oracle_history(const std::vector<Event>& events,
                                const FailurePattern& pattern,
                                const OracleSpecInfo& spec, bool hit_bound) {
  Verdict v;
  std::vector<long> wf_ev, ag_ev, suit_ev;
  std::string wf_note, suit_note;

  std::map<ProcessId, int> answered_count;
  std::map<ProcessId, bool> pending;
  std::vector<ConsRebuild> cons;

  auto is_consultant = [&](ProcessId p) {
    return std::find(spec.consultants.begin(), spec.consultants.end(), p) !=
           spec.consultants.end();
  };

  for (size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.kind != EventKind::Query && e.kind != EventKind::Answer) continue;
    if (!is_consultant(e.pid)) {
      wf_ev.push_back(static_cast<long>(i));
      wf_note = "event by non-consultant";
      continue;
    }
    if (e.kind == EventKind::Query) {
      if (pending[e.pid]) {
        wf_ev.push_back(static_cast<long>(i));
        wf_note = "query while one is pending";
        continue;
      }
      int idx = answered_count[e.pid] + 1;
      while (static_cast<int>(cons.size()) < idx) cons.emplace_back();
      ConsRebuild& c = cons[static_cast<size_t>(idx - 1)];
      if (c.vector_so_far.has(e.pid)) {
        wf_ev.push_back(static_cast<long>(i));
        wf_note = "second query in one consultation";
        continue;
      }
      c.vector_so_far.set(e.pid, e.value);
      c.queries.push_back({e.pid, {e.value, e.t}});
      pending[e.pid] = true;
    } else {  // Answer
      if (!pending[e.pid]) {
        wf_ev.push_back(static_cast<long>(i));
        wf_note = "answer without a pending query";
        continue;
      }
      int idx = answered_count[e.pid] + 1;
      ConsRebuild& c = cons[static_cast<size_t>(idx - 1)];
      c.answers.push_back({e.pid, {e.value, e.t}});
      if (!c.committed) c.committed = e.value;
      if (*c.committed != e.value) ag_ev.push_back(static_cast<long>(i));
      // Suitability under the mode's failure view at answer time.
      int fc = spec.mode == OracleMode::Sham
                   ? pattern.faulty_count_within_at(spec.consultants, e.t)
                   : pattern.faulty_count_within(spec.consultants);
      DecisionSet allowed = oracle_allowed(spec.problem, fc, c.vector_so_far);
      if (!allowed.contains(e.value)) {
        suit_ev.push_back(static_cast<long>(i));
        if (suit_note.empty())
          suit_note = "answer " + std::to_string(e.value) + " not in " +
                      allowed.str() + " (view " + std::to_string(fc) + " at t=" +
                      std::to_string(e.t) + ")";
      }
      answered_count[e.pid] += 1;
      pending[e.pid] = false;
    }
  }

  v.add("wellformed", wf_ev.empty() ? Status::Pass : Status::Fail, wf_ev, wf_note);
  v.add("agreement", ag_ev.empty() ? Status::Pass : Status::Fail, ag_ev);
  v.add("suitability", suit_ev.empty() ? Status::Pass : Status::Fail, suit_ev,
        suit_note);

  // (d) f-resiliency: a consultation that reached quorum answers every
  // correct querier by the end of the history.
  int quorum = static_cast<int>(spec.consultants.size()) - spec.f;
  Status resil = Status::Pass;
  std::string resil_note;
  for (const auto& c : cons) {
    if (static_cast<int>(c.queries.size()) < quorum) continue;
    for (const auto& [p, vt] : c.queries) {
      (void)vt;
      bool got = false;
      for (const auto& [q, at] : c.answers) {
        (void)at;
        if (q == p) got = true;
      }
      if (!got && !pattern.is_faulty(p)) {
        resil = hit_bound ? Status::Inconclusive : Status::Fail;
        resil_note = "correct querier " + std::to_string(p) + " unanswered";
      }
    }
  }
  v.add("resiliency", resil, {}, resil_note);

  // (e) consistency: comparable final vectors have equal answers.
  if (spec.mode == OracleMode::Consistent) {
    Status cst = Status::Pass;
    std::string note;
    for (size_t a = 0; a < cons.size(); ++a) {
      for (size_t b = a + 1; b < cons.size(); ++b) {
        if (!cons[a].committed || !cons[b].committed) continue;
        if (cons[a].vector_so_far.comparable_with(cons[b].vector_so_far) &&
            *cons[a].committed != *cons[b].committed) {
          cst = Status::Fail;
          note = "consultations " + std::to_string(a + 1) + " and " +
                 std::to_string(b + 1) + " comparable with different answers";
        }
      }
    }
    v.add("consistency", cst, {}, note);
  }

  return v;
}

}  // namespace ktag
