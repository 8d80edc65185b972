#ifndef TRIPOSE_ERRORS_H_
#define TRIPOSE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tripose {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input geometry cannot support the requested operation (coincident points,
// point on the principal plane, ...).
class DegenerateConfiguration : public Error {
  public:
    using Error::Error;
};

// Two-view triangulation has no unique solution (parallel rays, identical
// back-projected planes, point at infinity).
class TriangulationDegenerate : public Error {
  public:
    using Error::Error;
};

// A line triplet whose first two back-projected planes coincide; it cannot
// contribute constraint rows.
class DegenerateLine : public Error {
  public:
    using Error::Error;
};

// Fewer than 8 usable constraint rows after skipping degenerate features.
class InsufficientConstraints : public Error {
  public:
    using Error::Error;
};

// A matrix factorization did not converge or inputs were not finite.
class NumericalFailure : public Error {
  public:
    using Error::Error;
};

// A beta-coefficient case produced no usable candidate (zero rotation part,
// singular monomial system, no real roots, ...).
class DegenerateCandidate : public Error {
  public:
    using Error::Error;
};

// No pose candidate survived any solution case.
class NoCandidates : public Error {
  public:
    using Error::Error;
};

// Every feature was degenerate for scoring purposes.
class ScoreUnavailable : public Error {
  public:
    using Error::Error;
};

// Candidate list was empty at selection time.
class NoValidPose : public Error {
  public:
    using Error::Error;
};

// The translation block is rank deficient; translation unobservable.
class TranslationDegenerate : public Error {
  public:
    using Error::Error;
};

// No RANSAC iteration produced a valid hypothesis.
class RobustFailure : public Error {
  public:
    using Error::Error;
};

// Synthetic scene generation exhausted its resampling budget.
class SceneGenerationFailure : public Error {
  public:
    using Error::Error;
};

// Malformed numeric field in a dataset file; message names file and line.
class ParseError : public Error {
  public:
    using Error::Error;
};

// A required dataset file is missing.
class MissingData : public Error {
  public:
    using Error::Error;
};

// Not enough three-view tracks for a requested feature combination.
class InsufficientData : public Error {
  public:
    using Error::Error;
};

}  // namespace tripose

#endif  // TRIPOSE_ERRORS_H_
