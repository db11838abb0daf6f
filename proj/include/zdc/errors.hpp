#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace zdc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconsistentNes : public Error {
 public:
  using Error::Error;
};

class UnknownNodeId : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Same-tag cyclic dependency among reactions. `cycle` names the vertices in
/// dependency order; the last one depends back on the first.
class CausalityLoop : public Error {
 public:
  explicit CausalityLoop(std::vector<std::string> cycle);
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class LocalCycle : public Error {
 public:
  using Error::Error;
};

class BehaviorFault : public Error {
 public:
  using Error::Error;
};

class WireError : public Error {
 public:
  using Error::Error;
};

}  // namespace zdc
