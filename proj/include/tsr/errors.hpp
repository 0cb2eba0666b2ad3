#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsr {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeriesTooShort : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct LagTooLarge : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };
struct InvalidInput : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct InvalidSigma : Error { using Error::Error; };
struct DegenerateSeries : Error { using Error::Error; };
struct AllFitsFailed : Error { using Error::Error; };
struct SingularRegression : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct EmptyPanel : Error { using Error::Error; };
struct EmptyYear : Error { using Error::Error; };
struct DuplicateObservation : Error { using Error::Error; };
struct NonContiguousSeries : Error { using Error::Error; };

/// CSV ingestion error carrying the 1-based line and field position.
struct ParseError : Error {
    std::size_t line;
    std::size_t column;

    ParseError(const std::string& message, std::size_t line_no, std::size_t column_no)
        : Error(message + " (line " + std::to_string(line_no) + ", column " +
                std::to_string(column_no) + ")"),
          line(line_no),
          column(column_no) {}
};

}  // namespace tsr
