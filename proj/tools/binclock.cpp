#include <iostream>

#include <CLI11.hpp>

#include "binclock/cli.hpp"

namespace cli = binclock::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Event-driven gate-level simulator and binary clock model"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("sim", "Simulate or lint a netlist");
    sim->require_subcommand(1);

    cli::SimRunOptions run_opt;
    auto* run = sim->add_subcommand("run", "Simulate a netlist and write its trace as CSV");
    run->add_option("netlist", run_opt.netlist_path, "Netlist file")->required();
    run->add_option("--stim", run_opt.stim_path, "Stimulus script");
    run->add_option("--until", run_opt.until, "Simulation end time, e.g. 10s")->required();
    run->add_option("--trace", run_opt.trace_path, "Trace CSV output (default: stdout)");
    run->add_flag("--no-lint", run_opt.no_lint, "Skip the electrical rule check");

    std::string lint_path;
    auto* lint = sim->add_subcommand("lint", "Check a netlist and print diagnostics");
    lint->add_option("netlist", lint_path, "Netlist file")->required();

    cli::ClockRunOptions clock_opt;
    auto* clock = app.add_subcommand("clock", "Run the reference binary clock");
    clock->require_subcommand(1);
    auto* clock_run = clock->add_subcommand("run", "Simulate the clock and print its display");
    clock_run->add_option("--start", clock_opt.start, "Power-up time HH:MM:SS");
    clock_run->add_option("--set", clock_opt.set, "Operate the set buttons to reach HH:MM");
    clock_run->add_option("--duration", clock_opt.duration, "How long to run, e.g. 60s")->required();
    clock_run->add_option("--format", clock_opt.format, "traditional or bcd");
    clock_run->add_option("--sample", clock_opt.sample, "second or change");
    clock_run->add_flag("--grid", clock_opt.grid, "Print each frame as an LED grid");
    clock_run->add_option("--trace", clock_opt.trace_path, "Trace CSV output");
    clock_run->add_option("--seed", clock_opt.seed, "Bounce seed (default from BINCLOCK_SEED, else 1)");

    bool no_debounce = false;
    auto* netlist = clock->add_subcommand("netlist", "Print the reference clock netlist");
    netlist->add_flag("--no-debounce", no_debounce, "Wire the set buttons without Schmitt stages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitOk : cli::kExitUsage;
    }

    if (run->parsed())
        return cli::cmd_sim_run(run_opt, std::cout, std::cerr);
    if (lint->parsed())
        return cli::cmd_lint(lint_path, std::cout, std::cerr);
    if (netlist->parsed()) {
        binclock::ClockCircuitConfig cfg;
        cfg.debounce = !no_debounce;
        std::cout << binclock::format_netlist(binclock::build_clock_circuit(cfg));
        return cli::kExitOk;
    }
    return cli::cmd_clock_run(clock_opt, std::cout, std::cerr);
}
