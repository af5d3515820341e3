#include "sqzsync/error.hpp"

#include <sstream>

namespace sqzsync {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::BlochNormExceeded: return "BlochNormExceeded";
    case ErrorKind::NotADensityMatrix: return "NotADensityMatrix";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::SingularGenerator: return "SingularGenerator";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::NoMaximumFound: return "NoMaximumFound";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
    return kind != ErrorKind::InvalidParam && kind != ErrorKind::Io;
}

namespace {
std::string describe(const std::string& field, double value, const std::string& reason) {
    std::ostringstream os;
    os.precision(17);
    os << "invalid parameter '" << field << "' = " << value << ": " << reason;
    return os.str();
}
} // namespace

InvalidParam::InvalidParam(std::string field, double value, std::string reason)
    : Error(ErrorKind::InvalidParam, describe(field, value, reason)),
      field_(std::move(field)), value_(value), reason_(std::move(reason)) {}

} // namespace sqzsync
