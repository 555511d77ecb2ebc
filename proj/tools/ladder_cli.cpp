// ladder <experiment> [--config FILE] [--key value ...] --out DIR
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure or
// insufficient data, 4 IO error.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "ladder/ladder.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

std::string experiment_names() {
    std::string s;
    for (auto e : ladder::all_experiments()) s += (s.empty() ? "" : ", ") + std::string(ladder::to_string(e));
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement transfer on a two-leg spin ladder"};
    app.set_help_flag("--help", "Print this help message and exit");
    std::string experiment, config_file, out_dir;
    app.add_option("experiment", experiment, "One of: " + experiment_names())->required();
    app.add_option("--config", config_file, "Flat key = value configuration file");
    app.add_option("--out", out_dir, "Output directory")->required();

    std::map<std::string, std::string> flag_values;
    for (const auto& key : ladder::config_keys())
        app.add_option("--" + key, flag_values[key], "Override '" + key + "'")->group("Parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        const auto kind = ladder::parse_experiment(experiment);
        std::vector<ladder::ConfigEntry> file_entries;
        if (!config_file.empty()) file_entries = ladder::parse_config_text(ladder::read_text_file(config_file));
        std::vector<ladder::ConfigEntry> flags;
        for (const auto& key : ladder::config_keys())
            if (app.count("--" + key) > 0) flags.push_back({key, flag_values[key], 0});

        const auto cfg = ladder::build_config(kind, file_entries, flags);
        for (const auto& path : ladder::run_experiment(cfg, out_dir)) std::cout << path.string() << "\n";
        return 0;
    } catch (const ladder::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ladder::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ladder::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ladder::InsufficientData& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
