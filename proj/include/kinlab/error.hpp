#pragma once

#include <stdexcept>
#include <string>

namespace kinlab {

/// Base of every error raised by the library. `module()` names the component
/// that raised it so the CLI can report the offending module.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }
  virtual const char* kind() const noexcept { return "error"; }

 private:
  std::string module_;
};

#define KINLAB_ERROR_KIND(Name, Tag)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return Tag; }        \
  };

KINLAB_ERROR_KIND(MalformedInput, "malformed-input")
KINLAB_ERROR_KIND(OutOfRange, "out-of-range")
KINLAB_ERROR_KIND(DegenerateInput, "degenerate-input")
KINLAB_ERROR_KIND(TruncationError, "truncation")
KINLAB_ERROR_KIND(ResolutionError, "resolution")
KINLAB_ERROR_KIND(EndpointDivergence, "endpoint-divergence")
KINLAB_ERROR_KIND(InsufficientSamples, "insufficient-samples")

#undef KINLAB_ERROR_KIND

}  // namespace kinlab
