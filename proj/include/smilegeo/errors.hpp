#pragma once

#include <stdexcept>
#include <string>

namespace smilegeo {

enum class ErrorKind {
    InvalidArgument,
    DegenerateTenor,
    PriceOutOfBand,
    NoConvergence,
    InconsistentForward,
    TargetOutsideDomain,
    DomainTooNarrow,
    OriginOutsideShape,
    NonpositiveVol,
    CollinearPoints,
    DegenerateConfiguration,
    NotAnEllipse,
    CurveTooShort,
    DisjointSupport,
    DegenerateMass,
    ParseError,
    MissingAnchor,
    IoError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace smilegeo
