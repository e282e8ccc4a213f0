#include <termios.h>
#include <unistd.h>

#include <iostream>
#include <string>

#include "restarch/cli.hpp"

extern char** environ;

namespace {

std::optional<restarch::Credentials> prompt_credentials() {
    restarch::Credentials c;
    std::cerr << "login: " << std::flush;
    if (!std::getline(std::cin, c.user) || c.user.empty()) return std::nullopt;
    std::cerr << "password: " << std::flush;
    termios saved{};
    bool hide = tcgetattr(STDIN_FILENO, &saved) == 0;
    if (hide) {
        termios quiet = saved;
        quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
        tcsetattr(STDIN_FILENO, TCSANOW, &quiet);
    }
    std::getline(std::cin, c.secret);
    if (hide) tcsetattr(STDIN_FILENO, TCSANOW, &saved);
    std::cerr << "\n";
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    restarch::CliEnv env;
    for (char** e = environ; *e; ++e) {
        std::string kv = *e;
        auto eq = kv.find('=');
        if (eq != std::string::npos) env.vars[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (isatty(STDIN_FILENO)) env.prompt = prompt_credentials;
    std::vector<std::string> args(argv, argv + argc);
    return restarch::run_cli(args, std::cout, std::cerr, env);
}
