#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace critwin {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of an operation was not met by the caller.
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

class ZeroDegree : public Error {
 public:
  explicit ZeroDegree(std::size_t vertex)
      : Error("vertex " + std::to_string(vertex) + " has degree 0"), vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

class OddSum : public Error {
 public:
  explicit OddSum(std::int64_t sum)
      : Error("degree sum " + std::to_string(sum) + " is odd"), sum_(sum) {}
  std::int64_t sum() const noexcept { return sum_; }

 private:
  std::int64_t sum_;
};

// An identity that must hold unconditionally was found false; this points at
// an arithmetic bug rather than bad input.
class ViolatedIdentity : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class Exhausted : public Error {
 public:
  explicit Exhausted(int attempts)
      : Error("no simple configuration after " + std::to_string(attempts) + " attempts"),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class OverlappingPairs : public Error {
 public:
  using Error::Error;
};

class Halted : public Error {
 public:
  Halted() : Error("exploration has no unmatched vertex-copies left") {}
};

class Degenerate : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace critwin
