// Command-line front end: dtwist <command> --config <file> [--set key=value]...

#include "dtwist/app.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Modified Herman/Denjoy symplectic twist map: construction and checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    bool quiet = false;
    for (const char* name : {"build", "verify", "regularity", "portrait", "manifolds", "diffusion"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "INI config file")->required();
        sub->add_option("--set", overrides, "override, section.key=value");
        sub->add_flag("-q,--quiet", quiet, "print only the verdict");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    dtwist::Command cmd = dtwist::parse_command(app.get_subcommands().front()->get_name());
    dtwist::RunConfig cfg;
    try {
        cfg = dtwist::load_config(config_path);
        for (const auto& s : overrides) dtwist::apply_setting(cfg, s);
    } catch (const dtwist::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    dtwist::CommandResult res = dtwist::run_command(cmd, cfg);
    const auto& r = res.report;
    if (r.contains("error")) {
        std::cerr << r["error"]["kind"].get<std::string>() << " error: " << r["error"]["message"].get<std::string>()
                  << '\n';
        return res.exit_code;
    }
    if (!quiet) {
        for (const auto& c : r["checks"]) {
            std::printf("%-4s %-40s %.3e  (tol %.3e)\n", c["pass"].get<bool>() ? "ok" : "FAIL",
                        c["name"].get<std::string>().c_str(), c["measured"].get<double>(),
                        c["tolerance"].get<double>());
        }
    }
    std::printf("%s: %s, report in %s/%s.json\n", dtwist::to_string(cmd), r["pass"].get<bool>() ? "pass" : "FAIL",
                cfg.output_dir.c_str(), dtwist::to_string(cmd));
    return res.exit_code;
}
