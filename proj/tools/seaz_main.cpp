#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "seaz/error.hpp"

int main(int argc, char** argv) {
    using namespace seaz;
    CLI::App app{"Safe impedance range analysis for series-elastic actuators"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::string arch, condition, ff;

    const std::pair<cli::Command, const char*> commands[] = {
        {cli::Command::Analyze, "passivity verdicts, dc stiffness and frequency response at the configured gains"},
        {cli::Command::ZRegion, "z-region of the rendered spring-port impedance"},
        {cli::Command::MaxStiff, "maximum safe K_imp under the selected condition"},
        {cli::Command::Sweep, "parameter sweep of maxstiff, zregion or dc_stiffness"},
        {cli::Command::Simulate, "time-domain run against each configured environment"},
        {cli::Command::Study, "predicted safety against simulated stability over the sweep grid"},
        {cli::Command::Selftest, "run the acceptance criteria"},
    };
    for (const auto& [cmd, help] : commands) {
        auto* sub = app.add_subcommand(std::string(cli::to_string(cmd)), help);
        auto* cfg = sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        if (cmd != cli::Command::Selftest) cfg->required();
        sub->add_option("--out", out_dir, "output directory for report.json and CSV sidecars");
        sub->add_option("--arch", arch, "override architecture")->check(CLI::IsMember({"nodob", "dobm", "dobt"}));
        sub->add_option("--condition", condition, "override passivity condition")
            ->check(CLI::IsMember({"spring", "load-strict", "load-threshold"}));
        sub->add_option("--ff", ff, "override feedforward")->check(CLI::IsMember({"zero", "original", "proposed"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitConfig;
    }

    try {
        const auto cmd = cli::parse_command(app.get_subcommands().front()->get_name());
        cli::RunConfig rc = config_path.empty() ? cli::parse_config(cli::json::object()) : cli::load_config(config_path);
        cli::Overrides o;
        if (!arch.empty()) o.arch = model::parse_architecture(arch);
        if (!condition.empty()) o.condition = metrics::parse_condition(condition);
        if (!ff.empty()) o.ff = model::parse_feedforward(ff);
        cli::apply_overrides(rc, o);
        const auto res = cli::run_command(cmd, rc, out_dir);
        if (res.report.contains("error")) std::cerr << "error: " << res.report["error"].get<std::string>() << '\n';
        if (res.report.contains("results")) std::cout << res.report["results"].dump(2) << '\n';
        return res.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitConfig;
    }
}
