#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rlab::cli {

/// Runs the command-line front end. Exit codes: 0 all verdicts pass,
/// 1 a verdict failed, 2 usage or configuration error.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace rlab::cli
