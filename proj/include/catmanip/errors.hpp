#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace catmanip {

// Every failure the library raises maps to a stable name and a distinct
// process exit code so the CLI can report machine-readable errors.
enum class ErrorCode : int {
  Unknown = 1,
  ConfigError = 10,
  MissingArtifact = 11,
  Io = 12,
  SizeMismatch = 13,
  DegenerateInput = 14,
  EmptyCloud = 15,
  DegenerateExtent = 16,
  InvalidDistribution = 17,
  EmptyDatabase = 18,
  EmptyScene = 19,
  MissingAnchorImage = 20,
  EmptyTrajectory = 21,
  FrameChainError = 22,
  NoFeasibleSubgoal = 23,
  PathBlocked = 24,
  InvalidGeometry = 25,
  FractionOutOfRange = 26,
  OutOfFrustum = 27,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string name, const std::string& what)
      : std::runtime_error(what), code_(code), name_(std::move(name)) {}

  ErrorCode code() const { return code_; }
  const std::string& name() const { return name_; }

 private:
  ErrorCode code_;
  std::string name_;
};

#define CATMANIP_DEFINE_ERROR(Name)                              \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what)                       \
        : Error(ErrorCode::Name, #Name, what) {}                 \
  };

CATMANIP_DEFINE_ERROR(ConfigError)
CATMANIP_DEFINE_ERROR(MissingArtifact)
CATMANIP_DEFINE_ERROR(Io)
CATMANIP_DEFINE_ERROR(SizeMismatch)
CATMANIP_DEFINE_ERROR(DegenerateInput)
CATMANIP_DEFINE_ERROR(EmptyCloud)
CATMANIP_DEFINE_ERROR(DegenerateExtent)
CATMANIP_DEFINE_ERROR(InvalidDistribution)
CATMANIP_DEFINE_ERROR(EmptyDatabase)
CATMANIP_DEFINE_ERROR(EmptyScene)
CATMANIP_DEFINE_ERROR(MissingAnchorImage)
CATMANIP_DEFINE_ERROR(EmptyTrajectory)
CATMANIP_DEFINE_ERROR(FrameChainError)
CATMANIP_DEFINE_ERROR(NoFeasibleSubgoal)
CATMANIP_DEFINE_ERROR(PathBlocked)
CATMANIP_DEFINE_ERROR(InvalidGeometry)
CATMANIP_DEFINE_ERROR(FractionOutOfRange)
CATMANIP_DEFINE_ERROR(OutOfFrustum)

#undef CATMANIP_DEFINE_ERROR

}  // namespace catmanip
