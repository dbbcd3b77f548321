#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ktag {

using ProcessId = int;  // 1..n, contiguous
using Time = long;      // discrete global ticks, first event at t=1

struct KtagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParameterError : KtagError {
  using KtagError::KtagError;
};
struct ProtocolViolation : KtagError {
  using KtagError::KtagError;
};
struct EnumerationBound : KtagError {
  using KtagError::KtagError;
};
struct InternalInvariant : KtagError {
  using KtagError::KtagError;
};

/// Per-process crash times. Absent pid = never crashes.
/// F(t) = {p : crash_time(p) <= t}; a process can still act at tick t
/// only if crash_time(p) > t.
class FailurePattern {
 public:
  FailurePattern() = default;

  void set_crash(ProcessId p, Time t) { crash_[p] = t; }
  void clear_crash(ProcessId p) { crash_.erase(p); }

  std::optional<Time> crash_time(ProcessId p) const {
    auto it = crash_.find(p);
    if (it == crash_.end()) return std::nullopt;
    return it->second;
  }
  bool is_faulty(ProcessId p) const { return crash_.count(p) > 0; }
  bool crashed_by(ProcessId p, Time t) const {
    auto it = crash_.find(p);
    return it != crash_.end() && it->second <= t;
  }
  bool can_act_at(ProcessId p, Time t) const { return !crashed_by(p, t); }

  int faulty_count() const { return static_cast<int>(crash_.size()); }
  int faulty_count_within(const std::vector<ProcessId>& group) const {
    int c = 0;
    for (ProcessId p : group) c += is_faulty(p) ? 1 : 0;
    return c;
  }
  int faulty_count_within_at(const std::vector<ProcessId>& group, Time t) const {
    int c = 0;
    for (ProcessId p : group) c += crashed_by(p, t) ? 1 : 0;
    return c;
  }

  /// F_theta: crashes strictly after theta are erased.
  FailurePattern truncated(Time theta) const {
    FailurePattern out;
    for (auto& [p, t] : crash_)
      if (t <= theta) out.crash_[p] = t;
    return out;
  }

  const std::map<ProcessId, Time>& crashes() const { return crash_; }
  bool operator==(const FailurePattern&) const = default;

 private:
  std::map<ProcessId, Time> crash_;
};

/// Total binary assignment for processes 1..n.
struct InputVector {
  std::vector<int> bits;

  int n() const { return static_cast<int>(bits.size()); }
  int at(ProcessId p) const { return bits.at(static_cast<size_t>(p - 1)); }
  void set(ProcessId p, int b) { bits.at(static_cast<size_t>(p - 1)) = b; }
  int zeros() const {
    int c = 0;
    for (int b : bits) c += (b == 0);
    return c;
  }
  bool all_equal(int v) const {
    for (int b : bits)
      if (b != v) return false;
    return true;
  }

  static InputVector all(int n, int v) {
    InputVector iv;
    iv.bits.assign(static_cast<size_t>(n), v);
    return iv;
  }
  static InputVector from_string(const std::string& s) {
    InputVector iv;
    for (char c : s) {
      if (c != '0' && c != '1') throw ParameterError("input bitstring must be 0/1");
      iv.bits.push_back(c - '0');
    }
    return iv;
  }
  std::string str() const {
    std::string s;
    for (int b : bits) s.push_back(static_cast<char>('0' + b));
    return s;
  }
  bool operator==(const InputVector&) const = default;
};

/// Partial binary query vector with the extension (sub-assignment) order.
class PartialVector {
 public:
  PartialVector() = default;

  void set(ProcessId p, int v) { vals_[p] = v; }
  bool has(ProcessId p) const { return vals_.count(p) > 0; }
  int at(ProcessId p) const { return vals_.at(p); }
  int present_count() const { return static_cast<int>(vals_.size()); }
  const std::map<ProcessId, int>& entries() const { return vals_; }

  int present_zeros() const {
    int c = 0;
    for (auto& [p, v] : vals_) c += (v == 0);
    return c;
  }
  bool all_present_one() const {
    for (auto& [p, v] : vals_)
      if (v != 1) return false;
    return true;  // vacuously true when empty
  }
  bool any_present_one() const {
    for (auto& [p, v] : vals_)
      if (v == 1) return true;
    return false;
  }
  int zeros_plus_missing(const std::vector<ProcessId>& universe) const {
    int c = 0;
    for (ProcessId p : universe) {
      auto it = vals_.find(p);
      if (it == vals_.end() || it->second == 0) ++c;
    }
    return c;
  }
  bool total_on(const std::vector<ProcessId>& universe) const {
    for (ProcessId p : universe)
      if (!has(p)) return false;
    return true;
  }

  /// a >= b: dom(a) contains dom(b) and they agree there.
  static bool extends(const PartialVector& a, const PartialVector& b) {
    for (auto& [p, v] : b.vals_) {
      auto it = a.vals_.find(p);
      if (it == a.vals_.end() || it->second != v) return false;
    }
    return true;
  }
  bool comparable_with(const PartialVector& o) const {
    return extends(*this, o) || extends(o, *this);
  }

  static PartialVector from_inputs(const InputVector& iv) {
    PartialVector w;
    for (int i = 0; i < iv.n(); ++i) w.set(i + 1, iv.bits[static_cast<size_t>(i)]);
    return w;
  }
  /// Pattern string over pids 1..len: '0'/'1' present, '?' missing.
  static PartialVector from_pattern(const std::string& s) {
    PartialVector w;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '0' || s[i] == '1')
        w.set(static_cast<ProcessId>(i + 1), s[i] - '0');
      else if (s[i] != '?')
        throw ParameterError("pattern must be 0/1/?");
    }
    return w;
  }
  std::string str(const std::vector<ProcessId>& universe) const {
    std::string s;
    for (ProcessId p : universe) {
      auto it = vals_.find(p);
      s.push_back(it == vals_.end() ? '?' : static_cast<char>('0' + it->second));
    }
    return s;
  }
  bool operator==(const PartialVector&) const = default;

 private:
  std::map<ProcessId, int> vals_;
};

/// Subset of {0,1}; may be empty ("not yet answerable").
struct DecisionSet {
  bool zero{false};
  bool one{false};

  bool contains(int v) const { return v == 0 ? zero : one; }
  bool empty() const { return !zero && !one; }
  bool subset_of(const DecisionSet& o) const {
    return (!zero || o.zero) && (!one || o.one);
  }
  DecisionSet intersect(const DecisionSet& o) const {
    return DecisionSet{zero && o.zero, one && o.one};
  }
  std::string str() const {
    if (zero && one) return "{0,1}";
    if (zero) return "{0}";
    if (one) return "{1}";
    return "{}";
  }
  bool operator==(const DecisionSet&) const = default;
};

/// Protocol message: a tag plus small integer fields,
/// e.g. ("R", [x, round]) or ("W", [oracle_index, value]).
struct Message {
  std::string tag;
  std::vector<int> vals;
  bool operator==(const Message&) const = default;
};

enum class EventKind { Send, Recv, Query, Answer, Decide };

inline char event_kind_char(EventKind k) {
  switch (k) {
    case EventKind::Send: return 'S';
    case EventKind::Recv: return 'R';
    case EventKind::Query: return 'Q';
    case EventKind::Answer: return 'A';
    case EventKind::Decide: return 'D';
  }
  return '?';
}

inline const char* kBufferLoc = "buf";
inline const char* kLocalLoc = "local";  // decide events

/// One entry of a run history. Exactly one event per tick.
struct Event {
  Time t{0};
  std::string loc;  // kBufferLoc or a sanctuary id
  ProcessId pid{0};
  EventKind kind{EventKind::Send};
  Message msg;                    // Send / Recv
  std::vector<ProcessId> dests;   // Send
  long seq{-1};                   // Send / Recv (message identity)
  ProcessId from{0};              // Recv
  int value{-1};                  // Query / Answer / Decide

  bool operator==(const Event&) const = default;
};

}  // namespace ktag
