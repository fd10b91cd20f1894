#pragma once

#include <stdexcept>
#include <string>

namespace drivepat {

// Process exit codes used by the CLI; library errors carry the code they
// should map to so the tool layer stays a thin shell.
enum class ExitCode : int {
  Ok = 0,
  Input = 2,
  Config = 3,
  DegenerateData = 4,
  NonConvergence = 5,
};

class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ExitCode code() const { return code_; }

private:
  ExitCode code_;
};

inline Error input_error(const std::string& msg) { return {ExitCode::Input, msg}; }
inline Error config_error(const std::string& msg) { return {ExitCode::Config, msg}; }
inline Error degenerate_error(const std::string& msg) { return {ExitCode::DegenerateData, msg}; }
inline Error convergence_error(const std::string& msg) { return {ExitCode::NonConvergence, msg}; }

}  // namespace drivepat
