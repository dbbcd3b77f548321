#include "ktag/tasks.hpp"

#include <algorithm>

namespace ktag {

static std::vector<ProcessId> iota_members(int n) {
  std::vector<ProcessId> m(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i)] = i + 1;
  return m;
}

ProblemSpec ProblemSpec::ktag(int k, std::vector<ProcessId> members) {
  std::sort(members.begin(), members.end());
  ProblemSpec p;
  p.kind = ProblemKind::KTag;
  p.k = k;
  p.members = std::move(members);
  if (p.k < 1 || p.k > p.n())
    throw ParameterError("kTAg threshold out of range: k=" + std::to_string(k) +
                         " n=" + std::to_string(p.n()));
  return p;
}

ProblemSpec ProblemSpec::ktag(int k, int n) { return ktag(k, iota_members(n)); }

ProblemSpec ProblemSpec::wag(std::vector<ProcessId> members) {
  std::sort(members.begin(), members.end());
  ProblemSpec p;
  p.kind = ProblemKind::WAg;
  p.k = 0;
  p.members = std::move(members);
  return p;
}

ProblemSpec ProblemSpec::wag(int n) { return wag(iota_members(n)); }

std::string ProblemSpec::label() const {
  if (kind == ProblemKind::WAg) return "wag";
  return "ktag:" + std::to_string(k);
}

std::string TaskSpec::label() const {
  return problem.label() + "(n=" + std::to_string(problem.n()) +
         ",f=" + std::to_string(f) + ")";
}

static void check_faulty_count(const ProblemSpec& p, int fc) {
  if (fc < 0 || fc > p.n())
    throw ParameterError("faulty count out of range: " + std::to_string(fc));
}

DecisionSet decision_set(const ProblemSpec& problem, int faulty_count,
                         const PartialVector& v) {
  check_faulty_count(problem, faulty_count);
  if (!v.total_on(problem.members))
    throw ParameterError("decision_set needs a total input vector");

  int zeros = v.zeros_plus_missing(problem.members);  // no missing here
  if (problem.kind == ProblemKind::KTag) {
    if (zeros >= problem.k) return {true, false};
    if (zeros == 0 && faulty_count <= problem.k - 1) return {false, true};
    return {true, true};
  }
  // WAg: unanimity binds only in failure-free patterns.
  if (faulty_count == 0 && zeros == problem.n()) return {true, false};
  if (faulty_count == 0 && zeros == 0) return {false, true};
  return {true, true};
}

DecisionSet decision_set(const ProblemSpec& problem, const FailurePattern& f,
                         const InputVector& v) {
  PartialVector w;
  for (ProcessId p : problem.members) w.set(p, v.at(p));
  return decision_set(problem, f.faulty_count_within(problem.members), w);
}

DecisionSet oracle_allowed(const ProblemSpec& problem, int faulty_count,
                           const PartialVector& w) {
  check_faulty_count(problem, faulty_count);
  for (auto& [p, v] : w.entries()) {
    (void)v;
    if (std::find(problem.members.begin(), problem.members.end(), p) ==
        problem.members.end())
      throw ParameterError("query vector names a process outside the problem set");
  }

  if (problem.kind == ProblemKind::KTag) {
    // 1 survives iff no extension reaches k zeros; 0 survives unless the
    // all-ones forced case is the only reachable one.
    bool one = w.zeros_plus_missing(problem.members) <= problem.k - 1;
    bool zero = !(w.all_present_one() && faulty_count <= problem.k - 1);
    return {zero, one};
  }
  // WAg
  bool one = !(faulty_count == 0 && !w.any_present_one());
  bool zero = !(faulty_count == 0 && w.all_present_one());
  return {zero, one};
}

DecisionSet oracle_allowed_bruteforce(const ProblemSpec& problem, int faulty_count,
                                      const PartialVector& w) {
  check_faulty_count(problem, faulty_count);
  std::vector<ProcessId> missing;
  for (ProcessId p : problem.members)
    if (!w.has(p)) missing.push_back(p);
  if (problem.n() > 20) throw EnumerationBound("bruteforce limited to n <= 20");

  DecisionSet acc{true, true};
  const size_t m = missing.size();
  for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
    PartialVector v = w;
    for (size_t i = 0; i < m; ++i) v.set(missing[i], (mask >> i) & 1u);
    acc = acc.intersect(decision_set(problem, faulty_count, v));
    if (acc.empty()) break;
  }
  return acc;
}

GeneralizationResult is_generalization(const TaskSpec& t1, const TaskSpec& t2) {
  if (t1.problem.members != t2.problem.members)
    throw ParameterError("is_generalization: mismatched process sets");
  const int n = t1.problem.n();
  if (n > 12) throw EnumerationBound("is_generalization limited to n <= 12");

  GeneralizationResult res;
  if (t1.f > t2.f) {
    res.holds = false;
    res.reason = "resiliency: f1 > f2";
    return res;
  }
  for (int fc = 0; fc <= t1.f; ++fc) {
    for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
      PartialVector v;
      for (int i = 0; i < n; ++i)
        v.set(t1.problem.members[static_cast<size_t>(i)],
              static_cast<int>((mask >> i) & 1u));
      DecisionSet d2 = decision_set(t2.problem, fc, v);
      DecisionSet d1 = decision_set(t1.problem, fc, v);
      if (!d2.subset_of(d1)) {
        res.holds = false;
        res.reason = "decision sets: P2 not within P1";
        for (int d : {0, 1}) {
          if (d2.contains(d) && !d1.contains(d)) {
            res.witness = GeneralizationWitness{fc, v, d};
            break;
          }
        }
        return res;
      }
    }
  }
  res.holds = true;
  return res;
}

}  // namespace ktag
