#pragma once

#include <optional>
#include <string>

#include "ktag/checker.hpp"
#include "ktag/protocols.hpp"

namespace ktag {

/// Output of the schedule refuting a candidate reduction from kTAg(k)(n,f)
/// to wait-free Consensus: rho (all-ones inputs, the k lowest processes
/// initially crashed, preference-0 oracle), rho_flipped (same history,
/// crashed inputs flipped to 0) and rho0 (failure-free fair extension of
/// rho's decision prefix). A correct candidate would pass all three.
struct Ir1Result {
  bool inconclusive{false};
  std::string note;
  Run rho, rho_flipped, rho0;
  Verdict v_rho, v_flipped, v_rho0;  // task conditions vs kTAg(k)(n,f)
  Verdict s_rho, s_flipped, s_rho0;  // structural validation

  bool validity_fail_somewhere() const;
  bool structure_clean() const;
  bool demonstrated() const {
    return !inconclusive && validity_fail_somewhere() && structure_clean();
  }
};

Ir1Result build_ir1(const ProtocolSpec& candidate, int n, int f, int k,
                    long bound = 10000);

/// The first forced answer that a sham oracle could not have given: the
/// certificate carries the consultation vector, the frozen-prefix failure
/// view and the allowed set at that moment.
struct Ir3Blocked {
  long event_index{-1};
  Event event;
  PartialVector vector;
  int view_fc{0};
  DecisionSet allowed;
  std::string explain;
};

/// Output of the partition schedule against a candidate reduction from
/// kTAg(f+1)(n,f) to kTAg(f)(n,f) with n <= 2f: rho_prime (zeros decide 0),
/// rho_dblprime (ones decide 1) and their merged run, which is structurally
/// legal but violates agreement; with a sham oracle the merge is BLOCKED.
struct Ir3Result {
  bool inconclusive{false};
  std::string note;
  Run rho_prime, rho_dblprime, merged;
  Verdict v_prime, v_dbl, v_merged;  // task conditions vs kTAg(f+1)(n,f)
  Verdict s_merged;                  // merged structural validation
  std::optional<Ir3Blocked> blocked;

  bool demonstrated(OracleMode mode) const;
};

Ir3Result build_ir3(const ProtocolSpec& candidate, int n, int f,
                    OracleMode mode, long bound = 10000);

}  // namespace ktag
