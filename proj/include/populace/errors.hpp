#pragma once

#include <stdexcept>
#include <string>

namespace populace {

/// Root of every exception the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id) : Error("duplicate object id: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class UnknownObject : public Error {
 public:
  explicit UnknownObject(std::string id) : Error("unknown object: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class CyclicSupport : public Error {
 public:
  using Error::Error;
};

class NotSittable : public Error {
 public:
  explicit NotSittable(const std::string& id) : Error("object is not sittable: " + id) {}
};

class NoFreeSpace : public Error {
 public:
  using Error::Error;
};

class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

class EmptyFloor : public Error {
 public:
  using Error::Error;
};

class BlockedGoal : public Error {
 public:
  using Error::Error;
};

class EmptyDatabase : public Error {
 public:
  using Error::Error;
};

class EmptyQuery : public Error {
 public:
  using Error::Error;
};

class CharacterBusy : public Error {
 public:
  explicit CharacterBusy(std::string name)
      : Error("character already assigned to an ongoing event: " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class UnknownAction : public Error {
 public:
  explicit UnknownAction(std::string action)
      : Error("action not available in this scene: " + action), action_(std::move(action)) {}
  const std::string& action() const { return action_; }

 private:
  std::string action_;
};

class BackendError : public Error {
 public:
  BackendError(const std::string& what, int attempts) : Error(what), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

/// The narrator could not produce an acceptable event within the retry budget.
class PlanningError : public Error {
 public:
  using Error::Error;
};

enum class ExecutionFailure { NoScript, Syntax, Runtime, Grounding };

const char* to_string(ExecutionFailure f);

/// The event parser could not produce an executable script within the retry budget.
class ExecutionError : public Error {
 public:
  ExecutionError(ExecutionFailure reason, const std::string& what) : Error(what), reason_(reason) {}
  ExecutionFailure reason() const { return reason_; }

 private:
  ExecutionFailure reason_;
};

}  // namespace populace
