#pragma once

#include <stdexcept>
#include <string>

namespace hrt {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// linear algebra
struct DimensionMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };

// split optimization
struct TooFewSamples : Error { using Error::Error; };
struct EmptyPartitionSide : Error { using Error::Error; };
struct DegenerateBlock : Error { using Error::Error; };
struct NoDescent : Error { using Error::Error; };
struct Unsplittable : Error { using Error::Error; };

// tree
struct EmptyTrainingSet : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct CorruptPayload : Error { using Error::Error; };

// datasets
struct ParseError : Error {
    ParseError(std::size_t row, std::size_t col, const std::string& what)
        : Error("parse error at row " + std::to_string(row) + ", column " +
                std::to_string(col) + ": " + what),
          row(row), col(col) {}
    std::size_t row;
    std::size_t col;
};
struct MissingTarget : Error { using Error::Error; };
struct RaggedRows : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct SingleClass : Error { using Error::Error; };

} // namespace hrt
