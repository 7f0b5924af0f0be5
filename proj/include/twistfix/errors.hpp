#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twistfix {

// Numerical rank decision fell inside the ambiguity band.
class IllConditioned : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A group action failed the homomorphism / automorphism / covariance checks.
class InconsistentAction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed span that must be a *-algebra was not closed.
class InconsistentAlgebra : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotStrictlyConvergent : public std::runtime_error {
 public:
  NotStrictlyConvergent(const std::string& what, std::size_t test_element)
      : std::runtime_error(what), test_element_(test_element) {}
  /// Index (into the generating set) of the element b whose b*(S_K - S_K')b did not settle.
  std::size_t test_element() const noexcept { return test_element_; }

 private:
  std::size_t test_element_;
};

class RankDeficient : public std::runtime_error {
 public:
  RankDeficient(const std::string& what, std::size_t point)
      : std::runtime_error(what), point_(point) {}
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

class NotFull : public std::runtime_error {
 public:
  NotFull(const std::string& what, std::size_t point) : std::runtime_error(what), point_(point) {}
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

// Winding number cannot be resolved from the given samples.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twistfix
