#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ktag/types.hpp"

namespace ktag {

/// What a process is about to do. The automaton fully determines its next
/// event type; the scheduler only chooses when it happens and (for
/// receives) which buffered message arrives.
struct Need {
  enum class Kind { Step, Receive, Answer } kind{Kind::Step};
  std::string sanctuary;  // Answer only
  static Need step() { return {Kind::Step, {}}; }
  static Need receive() { return {Kind::Receive, {}}; }
  static Need answer(std::string s) { return {Kind::Answer, std::move(s)}; }
};

struct ActionSend {
  Message msg;
  std::vector<ProcessId> dests;
};
struct ActionQuery {
  std::string sanctuary;
  int value;
};
struct ActionDecide {
  int value;
};
using Action = std::variant<ActionSend, ActionQuery, ActionDecide>;

/// Deterministic process automaton. Identical state and stimulus always
/// produce the identical result. A finished process parks in Receive and
/// silently drains whatever is still delivered to it.
class Automaton {
 public:
  virtual ~Automaton() = default;
  virtual Need need() const = 0;
  virtual Action step() = 0;  // only when need() is Step
  virtual void on_message(ProcessId from, const Message& m) = 0;
  virtual void on_answer(const std::string& sanctuary, int value) = 0;
};

using AutomatonFactory =
    std::function<std::unique_ptr<Automaton>(ProcessId pid, int input_bit)>;

}  // namespace ktag
