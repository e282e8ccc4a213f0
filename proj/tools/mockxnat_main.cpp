#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "restarch/error.hpp"
#include "restarch/mock/server.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fixture-driven mock archive server"};
    app.require_subcommand(1);
    std::string fixture;
    int port = 0;
    auto* serve = app.add_subcommand("serve", "Serve a fixture on 127.0.0.1 until interrupted");
    serve->add_option("fixture", fixture, "Fixture JSON file")->required()->check(CLI::ExistingFile);
    serve->add_option("--port", port, "TCP port; 0 picks a free one")->check(CLI::Range(0, 65535));
    CLI11_PARSE(app, argc, argv);

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    try {
        restarch::mock::MockServer server(restarch::mock::Fixture::load(fixture), port);
        std::cout << server.url() << std::endl;
        int received = 0;
        sigwait(&signals, &received);
    } catch (const restarch::PortUnavailable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
