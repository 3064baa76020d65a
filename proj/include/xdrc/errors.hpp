#pragma once

#include <stdexcept>
#include <string>

namespace xdrc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define XDRC_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& what) : Error(what) {}   \
    };

XDRC_DEFINE_ERROR(DegenerateDomain)
XDRC_DEFINE_ERROR(InvalidParameter)
XDRC_DEFINE_ERROR(ShapeMismatch)
XDRC_DEFINE_ERROR(OracleCapacityExceeded)
XDRC_DEFINE_ERROR(CouplingViolation)
XDRC_DEFINE_ERROR(ParityInconsistency)
XDRC_DEFINE_ERROR(SignCountMismatch)
XDRC_DEFINE_ERROR(OverlappingSupports)
XDRC_DEFINE_ERROR(ContractViolation)
XDRC_DEFINE_ERROR(InvalidVertex)
XDRC_DEFINE_ERROR(OutOfDomain)
XDRC_DEFINE_ERROR(DiagonalSingularity)
XDRC_DEFINE_ERROR(ConfigError)

#undef XDRC_DEFINE_ERROR

class PointSwallowed : public Error {
public:
    PointSwallowed(const std::string& what, double t_swallow)
        : Error(what), t_swallow_(t_swallow) {}
    double swallow_time() const noexcept { return t_swallow_; }

private:
    double t_swallow_;
};

}  // namespace xdrc
