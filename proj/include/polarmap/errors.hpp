#pragma once

#include <stdexcept>
#include <string>

namespace polarmap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// elementary functions evaluated outside their admissible domain,
// or points outside an immersion's parameter rectangle
struct DomainError : Error {
    using Error::Error;
};

// linearly dependent input to Gram-Schmidt / rank-2 failures
struct RankError : Error {
    using Error::Error;
};

// parse errors carry a 1-based source position
struct ParseError : Error {
    int line;
    int col;
    ParseError(std::string msg, int line_, int col_)
        : Error(std::move(msg) + " (line " + std::to_string(line_) + ", col " +
                std::to_string(col_) + ")"),
          line(line_),
          col(col_) {}
};

struct SyntaxError : ParseError {
    using ParseError::ParseError;
};

struct UnknownIdentifierError : ParseError {
    using ParseError::ParseError;
};

struct ArityError : ParseError {
    using ParseError::ParseError;
};

// load-time immersion checks (component count, sphericality, rank)
struct ValidationError : Error {
    using Error::Error;
};

struct UnknownGalleryError : Error {
    using Error::Error;
};

// polar map evaluated where its regularity function vanishes
struct SingularPointError : Error {
    using Error::Error;
};

// formulas involving log(1-K) near K = 1
struct NearFlatError : Error {
    using Error::Error;
};

// finite-difference stencil left the domain or hit a singular point
struct StencilError : Error {
    using Error::Error;
};

// the two u computations disagree beyond tolerance
struct ConventionMismatchError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct PoleCollisionError : Error {
    using Error::Error;
};

struct IOError : Error {
    using Error::Error;
};

// flow integration produced non-unit speed
struct StepError : Error {
    using Error::Error;
};

// flow trajectory hit the singular set
struct SingularEncounterError : Error {
    using Error::Error;
};

}  // namespace polarmap
