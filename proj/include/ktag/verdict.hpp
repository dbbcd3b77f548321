#pragma once

#include <string>
#include <vector>

namespace ktag {

enum class Status { Pass, Fail, Vacuous, Inconclusive };

inline const char* status_str(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Vacuous: return "VACUOUS";
    case Status::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

struct ConditionReport {
  std::string name;
  Status status{Status::Pass};
  std::vector<long> evidence;  // indices into the run history
  std::string note;
};

/// Per-condition pass/fail report; overall is the conjunction
/// (FAIL dominates, then INCONCLUSIVE; VACUOUS counts as passing).
struct Verdict {
  std::vector<ConditionReport> conditions;

  void add(std::string name, Status st, std::vector<long> evidence = {},
           std::string note = {}) {
    conditions.push_back({std::move(name), st, std::move(evidence), std::move(note)});
  }
  void merge(const Verdict& other, const std::string& prefix = {}) {
    for (const auto& c : other.conditions) {
      conditions.push_back(c);
      if (!prefix.empty()) conditions.back().name = prefix + c.name;
    }
  }
  const ConditionReport* find(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return &c;
    return nullptr;
  }
  Status status_of(const std::string& name) const {
    const ConditionReport* c = find(name);
    return c ? c->status : Status::Vacuous;
  }
  bool any_fail() const {
    for (const auto& c : conditions)
      if (c.status == Status::Fail) return true;
    return false;
  }
  bool any_inconclusive() const {
    for (const auto& c : conditions)
      if (c.status == Status::Inconclusive) return true;
    return false;
  }
  Status overall() const {
    if (any_fail()) return Status::Fail;
    if (any_inconclusive()) return Status::Inconclusive;
    return Status::Pass;
  }
  std::string summary() const {
    std::string s = status_str(overall());
    for (const auto& c : conditions) {
      if (c.status == Status::Fail || c.status == Status::Inconclusive) {
        s += " [";
        s += c.name;
        s += "=";
        s += status_str(c.status);
        s += "]";
      }
    }
    return s;
  }
};

}  // namespace ktag
