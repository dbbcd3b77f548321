#pragma once

#include <string>

#include "ktag/runtime.hpp"

namespace ktag {

/// Query the (k+1)-threshold oracle over n+1 consultants once with the
/// input and decide the answer; the extra consultant never queries.
/// Solves kTAg(k)(n, f) with a kTAg(k+1)(n+1, f+1) oracle.
ProtocolSpec make_direct(int n, int f, int k);

/// Exchange inputs, take the minimum of n-f of them, ask Consensus once.
/// Solves kTAg(f+1)(n, f) with a Cons(n, f) oracle.
ProtocolSpec make_fig1(int n, int f);

/// Two consultations of a consistent f-threshold oracle, then round-based
/// proposal exchange when the oracle reports f failures.
/// Solves kTAg(f+1)(n, f) with a consistent kTAg(f)(n, f) oracle when n > 2f.
ProtocolSpec make_fig2(int n, int f);

/// Consult the n+1 leave-one-out oracles in index order, broadcast each
/// answer, decide the max (or min) once all n+1 answers are known.
/// max solves kTAg(k+1)(n+1, f); min solves kTAg(k)(n+1, f). The system has
/// n+1 processes; each oracle is kTAg(k) over one n-subset.
ProtocolSpec make_fig3(int n, int f, int k, bool use_max);

/// Two consultations of a sham f-threshold oracle, then a single input
/// exchange. Solves kTAg(f+1)(n, f) for every 1 <= f <= n-1.
ProtocolSpec make_fig4(int n, int f);

/// The do-nothing reduction: query the t2 oracle with the input, decide the
/// answer. Refuses (with the witness) unless t2 generalizes t1.
ProtocolSpec make_noop(const TaskSpec& t1, const TaskSpec& t2);

/// Query-and-decide against a wait-free Consensus oracle; the candidate the
/// ir1 driver refutes for kTAg(k)(n, f).
ProtocolSpec make_naive_cons_candidate(int n, int f, int k);

/// Decides a constant without consulting anything (same declared wiring as
/// the naive candidate).
ProtocolSpec make_const_candidate(int n, int f, int k, int value);

/// Single process deciding its input; engine smoke tests.
ProtocolSpec make_trivial(int n);

/// Rebuild a protocol from a trace header (name + params).
ProtocolSpec make_protocol_from_meta(const std::string& name,
                                     const std::map<std::string, int>& params);

}  // namespace ktag
