#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ruelle/cli/run.hpp"

int main(int argc, char** argv)
{
    using namespace ruelle::cli;

    CLI::App app{"Transfer-operator thermodynamics of expanding circle maps"};
    std::string command, config;
    Overrides ov;
    std::string commands_help;
    for (const auto& c : commands()) commands_help += (commands_help.empty() ? "" : ", ") + c;
    app.add_option("command", command, "one of: " + commands_help)->required()->check(CLI::IsMember(commands()));
    app.add_option("config", config, "JSON configuration file")->required();
    app.add_option("--out", ov.out_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", ov.seed, "random seed (overrides ldp.seed)");
    app.add_option("--threads", ov.threads, "worker thread cap; results do not depend on it")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const auto res = run_file(command, config, ov);
    const auto& status = res.report["status"];
    if (res.exit_code != kExitOk) {
        const auto& err = status["error"];
        std::cerr << "ruelle: " << err.value("kind", std::string("error")) << " error: "
                  << err.value("message", std::string()) << '\n';
    }
    for (const auto& f : res.files) std::cout << f << '\n';
    std::fprintf(stderr, "ruelle: %s finished in %.3f s (exit %d)\n", command.c_str(), res.seconds, res.exit_code);
    return res.exit_code;
}
