#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktag/types.hpp"

namespace ktag {

enum class ProblemKind { KTag, WAg };

/// An agreement problem over a fixed process set.
/// kTAg(1) is Atomic Commitment, kTAg(n) is binary Consensus.
struct ProblemSpec {
  ProblemKind kind{ProblemKind::KTag};
  int k{1};  // threshold, KTag only
  std::vector<ProcessId> members;

  int n() const { return static_cast<int>(members.size()); }

  static ProblemSpec ktag(int k, std::vector<ProcessId> members);
  static ProblemSpec ktag(int k, int n);  // members = 1..n
  static ProblemSpec wag(std::vector<ProcessId> members);
  static ProblemSpec wag(int n);
  static ProblemSpec cons(int n) { return ktag(n, n); }
  static ProblemSpec ac(int n) { return ktag(1, n); }

  std::string label() const;
  bool operator==(const ProblemSpec&) const = default;
};

/// A problem plus a resiliency degree f (failures tolerated).
struct TaskSpec {
  ProblemSpec problem;
  int f{0};

  std::string label() const;
  bool operator==(const TaskSpec&) const = default;
};

/// The problem's decision-set mapping for a total input vector.
/// Only |Faulty(F)| matters for every validity clause in scope, so the
/// failure pattern is reduced to a count.
DecisionSet decision_set(const ProblemSpec& problem, int faulty_count,
                         const PartialVector& v);
DecisionSet decision_set(const ProblemSpec& problem, const FailurePattern& f,
                         const InputVector& v);

/// Intersection of decision sets over all total extensions of w.
/// Empty means "the oracle must wait for more queries".
DecisionSet oracle_allowed(const ProblemSpec& problem, int faulty_count,
                           const PartialVector& w);

/// Independent oracle: literal enumeration of all 2^missing extensions.
DecisionSet oracle_allowed_bruteforce(const ProblemSpec& problem, int faulty_count,
                                      const PartialVector& w);

struct GeneralizationWitness {
  int faulty_count{0};
  PartialVector inputs;
  int decision{0};  // allowed by t2's problem but not t1's
};

struct GeneralizationResult {
  bool holds{false};
  std::string reason;
  std::optional<GeneralizationWitness> witness;
};

/// True iff t2 is a generalization of t1, i.e. any solution of t2 also
/// solves t1: f1 <= f2 and, for every faulty count <= f1 and every total
/// vector V, decision_set(P2,...) is contained in decision_set(P1,...).
GeneralizationResult is_generalization(const TaskSpec& t1, const TaskSpec& t2);

}  // namespace ktag
