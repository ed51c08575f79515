#include "smilegeo/errors.hpp"

namespace smilegeo {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DegenerateTenor: return "DegenerateTenor";
        case ErrorKind::PriceOutOfBand: return "PriceOutOfBand";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::InconsistentForward: return "InconsistentForward";
        case ErrorKind::TargetOutsideDomain: return "TargetOutsideDomain";
        case ErrorKind::DomainTooNarrow: return "DomainTooNarrow";
        case ErrorKind::OriginOutsideShape: return "OriginOutsideShape";
        case ErrorKind::NonpositiveVol: return "NonpositiveVol";
        case ErrorKind::CollinearPoints: return "CollinearPoints";
        case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorKind::NotAnEllipse: return "NotAnEllipse";
        case ErrorKind::CurveTooShort: return "CurveTooShort";
        case ErrorKind::DisjointSupport: return "DisjointSupport";
        case ErrorKind::DegenerateMass: return "DegenerateMass";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::MissingAnchor: return "MissingAnchor";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace smilegeo
