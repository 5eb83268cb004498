#include "tripod/config.hpp"
#include "tripod/errors.hpp"
#include "tripod/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int config_failure(const std::string& what) {
    std::cerr << tripod::error_line(tripod::exit_code::config, "config", what) << "\n";
    return tripod::exit_code::config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tripod EIT storage and beat simulator"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = "out";
    std::string preset;
    int threads = 1;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--preset", preset, "parameter preset")->check(CLI::IsMember({"paper", "desk"}));
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "random seed for synthetic noise");

    for (const char* name : {"darkstates", "slowlight", "store", "scan-transmission", "sweep-field", "fit-beat"})
        app.add_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return config_failure(e.what());
    }

    tripod::RunConfig config;
    try {
        std::string text;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) return config_failure("cannot read " + config_path);
            std::ostringstream ss;
            ss << f.rdbuf();
            text = ss.str();
        }
        std::optional<tripod::Preset> override;
        if (!preset.empty()) override = tripod::parse_preset(preset);
        config = tripod::parse_config(text, override);
    } catch (const std::exception& e) {
        return config_failure(e.what());
    }

    const auto sub = tripod::parse_subcommand(app.get_subcommands().front()->get_name());
    const auto outcome = tripod::run(sub, config, out_dir, {threads, seed});
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
    if (outcome.exit_code != 0) {
        std::cerr << outcome.error_line << "\n";
        return outcome.exit_code;
    }
    for (const auto& f : outcome.files) std::cout << out_dir << "/" << f << "\n";
    return 0;
}
