#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "restarch/transport.hpp"

namespace restarch {

/// Process context handed to the command-line front end.
struct CliEnv {
    std::map<std::string, std::string> vars;  // RESTARCH_URL, RESTARCH_USER, ...

    /// Asks for a login and password; set only when a terminal is attached.
    std::function<std::optional<Credentials>()> prompt;
};

/// Runs one command line (`args[0]` is the program name). Output goes to
/// `out` only on success, diagnostics to `err` only on failure. Returns 0
/// on success, 1 on error and 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliEnv& env);

}  // namespace restarch
