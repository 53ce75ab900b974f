#pragma once

#include <stdexcept>
#include <string>

namespace causamix {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Graph construction and model validity.
class CycleDetected : public Error {
 public:
  using Error::Error;
};
class UnknownNode : public Error {
 public:
  using Error::Error;
};
class NotCanonical : public Error {
 public:
  using Error::Error;
};
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Mixing-matrix manipulation.
class InsufficientColumns : public Error {
 public:
  using Error::Error;
};
class Unprunable : public Error {
 public:
  using Error::Error;
};

// Model mappings.
class ChoiceLengthMismatch : public Error {
 public:
  using Error::Error;
};
class NoPermutationFound : public Error {
 public:
  using Error::Error;
};
class NotUleafTarget : public Error {
 public:
  using Error::Error;
};
class NotLatentSource : public Error {
 public:
  using Error::Error;
};

// Grouping and recovery.
class NoValidRow : public Error {
 public:
  using Error::Error;
};
class ClassTooLarge : public Error {
 public:
  using Error::Error;
};
class SingularSubmatrix : public Error {
 public:
  using Error::Error;
};
class AllCandidatesSingular : public Error {
 public:
  using Error::Error;
};

// Faithfulness checks.
class CombinatorialCap : public Error {
 public:
  using Error::Error;
};
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Estimation.
class Diverged : public Error {
 public:
  using Error::Error;
};
class DegenerateData : public Error {
 public:
  using Error::Error;
};

// Evaluation.
class ZeroTrueEdges : public Error {
 public:
  using Error::Error;
};

}  // namespace causamix
