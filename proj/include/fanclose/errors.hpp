#pragma once

#include <stdexcept>
#include <string>

namespace fc {

// Exit-code classes of the command line contract.
enum class ExitCode : int { Ok = 0, CheckFailed = 1, Usage = 2, PrecisionCeiling = 3 };

class Error : public std::runtime_error {
public:
    Error(const std::string& what, ExitCode code) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

#define FC_ERROR(Name, Code)                                                  \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& w) : Error(#Name ": " + w, Code) {}  \
    };

FC_ERROR(PrecisionExhausted, ExitCode::PrecisionCeiling)
FC_ERROR(InvalidD, ExitCode::Usage)
FC_ERROR(DomainViolation, ExitCode::Usage)
FC_ERROR(PreconditionTooSmall, ExitCode::Usage)
FC_ERROR(RegimeAmbiguous, ExitCode::Usage)
FC_ERROR(CapMissing, ExitCode::Usage)
FC_ERROR(UsageError, ExitCode::Usage)
FC_ERROR(CheckpointCorrupt, ExitCode::Usage)
FC_ERROR(NotATriple, ExitCode::CheckFailed)
FC_ERROR(NonIntegerPoint, ExitCode::CheckFailed)
FC_ERROR(SideConditionFailed, ExitCode::CheckFailed)
FC_ERROR(NoConvergentWorks, ExitCode::CheckFailed)
FC_ERROR(InvariantBroken, ExitCode::CheckFailed)

#undef FC_ERROR

}  // namespace fc
