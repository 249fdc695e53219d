#pragma once

#include <string>
#include <vector>

#include "pcshape/error.hpp"

namespace pcshape::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kDegenerate = 3,
  kWindow = 4,
  kIo = 5,
};

ExitCode exit_code_for(Errc code);

/// Runs the command line; args[0] is the program name. Output goes to files
/// named by -o or to standard output, diagnostics to standard error.
int run(const std::vector<std::string>& args);

}  // namespace pcshape::cli
