#ifndef HOPPERSTAT_ERRORS_HPP
#define HOPPERSTAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hopperstat {

// Base class for all library errors. `code()` is a stable machine-readable
// tag; what() carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define HOPPERSTAT_DEFINE_ERROR(NAME)                       \
    class NAME : public Error {                             \
    public:                                                 \
        explicit NAME(const std::string& msg)               \
            : Error(#NAME, msg) {}                          \
    }

HOPPERSTAT_DEFINE_ERROR(UnsupportedFormat);
HOPPERSTAT_DEFINE_ERROR(CorruptImage);
HOPPERSTAT_DEFINE_ERROR(ZeroDimension);
HOPPERSTAT_DEFINE_ERROR(OutOfBounds);
HOPPERSTAT_DEFINE_ERROR(EmptySample);
HOPPERSTAT_DEFINE_ERROR(MissingClass);
HOPPERSTAT_DEFINE_ERROR(NonMonotoneClasses);
HOPPERSTAT_DEFINE_ERROR(DegenerateGate);
HOPPERSTAT_DEFINE_ERROR(MalformedModel);
HOPPERSTAT_DEFINE_ERROR(MalformedConfig);
HOPPERSTAT_DEFINE_ERROR(InvalidParams);
HOPPERSTAT_DEFINE_ERROR(IoFailure);
HOPPERSTAT_DEFINE_ERROR(MissingImage);
HOPPERSTAT_DEFINE_ERROR(LineOutOfBounds);
HOPPERSTAT_DEFINE_ERROR(MalformedManifest);

#undef HOPPERSTAT_DEFINE_ERROR

} // namespace hopperstat

#endif // HOPPERSTAT_ERRORS_HPP
