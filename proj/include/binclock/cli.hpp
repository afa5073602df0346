#pragma once

// Command implementations behind the `binclock` executable. Each command
// writes to the given streams and returns a process exit code.

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "binclock/circuit.hpp"
#include "binclock/clock.hpp"
#include "binclock/engine.hpp"
#include "binclock/lint.hpp"
#include "binclock/netlist.hpp"
#include "binclock/stimulus.hpp"
#include "binclock/trace_io.hpp"

namespace binclock::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1, // bad arguments, unreadable files, invalid times
    kExitParse = 2, // netlist or stimulus does not parse or validate
    kExitLint = 3,
    kExitOscillation = 4,
};

inline constexpr const char* kSeedEnv = "BINCLOCK_SEED";

// In `change` sampling, display states held for less than this are not shown.
inline constexpr SimTime kSettleTime = std::chrono::microseconds{1};

struct SimRunOptions {
    std::string netlist_path;
    std::optional<std::string> stim_path;
    std::string until;
    std::optional<std::string> trace_path; // stdout when absent
    bool no_lint = false;
};

struct ClockRunOptions {
    std::optional<std::string> start; // HH:MM:SS
    std::optional<std::string> set;   // HH:MM
    std::string duration = "0s";
    std::string format = "traditional";
    std::string sample = "second"; // second | change
    bool grid = false;
    std::optional<std::string> trace_path;
    std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::optional<std::string> read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline bool write_trace_file(const std::string& path, const Trace& trace, std::ostream& err)
{
    std::ofstream out(path, std::ios::binary);
    if (out)
        write_trace_csv(out, trace);
    if (!out) {
        err << "error: cannot write trace to '" << path << "'\n";
        return false;
    }
    return true;
}

inline void print_diagnostics(std::ostream& os, std::span<const Diagnostic> diags)
{
    for (const auto& d : diags)
        os << format_diagnostic(d) << '\n';
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s)
{
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

// Traditional pattern straight from net levels; '?' marks an Unknown net.
inline std::string raw_pattern(const DisplayLevels& levels)
{
    std::string s;
    std::optional<Field> field;
    for (const auto& dn : kDisplayNets) {
        if (field && *field != dn.field)
            s += ' ';
        field = dn.field;
        const Level l = levels.at(std::string(dn.name));
        s += l == Level::High ? '*' : l == Level::Low ? '.' : '?';
    }
    return s;
}

} // namespace detail

/// Seed from the environment, 1 when unset. Nullopt if set but malformed.
inline std::optional<std::uint64_t> default_seed()
{
    const char* env = std::getenv(kSeedEnv);
    if (!env)
        return 1;
    return detail::parse_u64(env);
}

/// `sim lint`: diagnostics one per line on `out`.
inline int cmd_lint(const std::string& netlist_path, std::ostream& out, std::ostream& err)
{
    auto text = detail::read_file(netlist_path);
    if (!text) {
        err << "error: cannot read '" << netlist_path << "'\n";
        return kExitUsage;
    }
    auto parsed = parse_netlist(*text);
    detail::print_diagnostics(out, parsed.diagnostics);
    if (!parsed.netlist)
        return kExitParse;
    auto diags = lint_netlist(*parsed.netlist);
    detail::print_diagnostics(out, diags);
    return has_errors(diags) ? kExitLint : kExitOk;
}

/// `sim run`: simulates a netlist and writes the trace CSV.
inline int cmd_sim_run(const SimRunOptions& opt, std::ostream& out, std::ostream& err)
{
    auto until = parse_duration(opt.until);
    if (!until) {
        err << "error: invalid duration '" << opt.until << "'\n";
        return kExitUsage;
    }
    auto text = detail::read_file(opt.netlist_path);
    if (!text) {
        err << "error: cannot read '" << opt.netlist_path << "'\n";
        return kExitUsage;
    }
    std::optional<std::string> stim_text;
    if (opt.stim_path) {
        stim_text = detail::read_file(*opt.stim_path);
        if (!stim_text) {
            err << "error: cannot read '" << *opt.stim_path << "'\n";
            return kExitUsage;
        }
    }

    auto parsed = parse_netlist(*text);
    if (!parsed.netlist) {
        detail::print_diagnostics(err, parsed.diagnostics);
        return kExitParse;
    }

    Circuit circuit;
    try {
        circuit = elaborate(*parsed.netlist, ElaborateOptions{opt.no_lint});
    } catch (const NetlistError& e) {
        detail::print_diagnostics(err, e.diagnostics());
        return kExitLint;
    }
    if (!opt.no_lint)
        detail::print_diagnostics(err, lint_netlist(*parsed.netlist));

    std::vector<Event> stimuli;
    if (stim_text) {
        auto script = parse_stimulus(*stim_text);
        if (!script.script) {
            detail::print_diagnostics(err, script.diagnostics);
            return kExitParse;
        }
        try {
            stimuli = compile_stimulus(circuit, *script.script);
        } catch (const std::invalid_argument& e) {
            err << "error stimulus " << e.what() << '\n';
            return kExitParse;
        }
    }

    SimConfig config;
    config.t_end = *until;
    Trace trace;
    try {
        trace = run(circuit, stimuli, config);
    } catch (const OscillationError& e) {
        err << "error oscillation " << e.what() << '\n';
        return kExitOscillation;
    } catch (const std::invalid_argument& e) {
        err << "error stimulus " << e.what() << '\n';
        return kExitParse;
    }

    if (opt.trace_path)
        return detail::write_trace_file(*opt.trace_path, trace, err) ? kExitOk : kExitUsage;
    write_trace_csv(out, trace);
    return kExitOk;
}

/// `clock run`: simulates the reference clock and prints display frames.
///
/// With --start the counters power up at that time. With --set the clock
/// powers up at zero and the set buttons are operated; frames then start at
/// the first mid-second after the last release. In `second` mode one frame
/// is printed per second of `duration` (at least one); in `change` mode one
/// frame per display state held for at least kSettleTime within `duration`.
inline int cmd_clock_run(const ClockRunOptions& opt, std::ostream& out, std::ostream& err)
{
    auto duration = parse_duration(opt.duration);
    if (!duration) {
        err << "error: invalid duration '" << opt.duration << "'\n";
        return kExitUsage;
    }
    if (opt.start && opt.set) {
        err << "error: --start and --set are mutually exclusive\n";
        return kExitUsage;
    }
    DisplayLayout layout;
    if (opt.format == "traditional") {
        layout = DisplayLayout::Traditional;
    } else if (opt.format == "bcd") {
        layout = DisplayLayout::Bcd;
    } else {
        err << "error: unknown format '" << opt.format << "'\n";
        return kExitUsage;
    }
    if (opt.sample != "second" && opt.sample != "change") {
        err << "error: unknown sample mode '" << opt.sample << "'\n";
        return kExitUsage;
    }
    std::optional<std::uint64_t> seed = opt.seed ? opt.seed : default_seed();
    if (!seed) {
        err << "error: " << kSeedEnv << " is not an unsigned integer\n";
        return kExitUsage;
    }

    ClockCircuitConfig cfg;
    cfg.hours_button.seed = *seed;
    cfg.minutes_button.seed = *seed + 1;
    SetPlan plan;
    SimTime origin{0};
    if (opt.start) {
        auto t = parse_time_of_day(*opt.start);
        if (!t) {
            err << "error: invalid start time '" << *opt.start << "' (expected HH:MM:SS)\n";
            return kExitUsage;
        }
        cfg.initial = *t;
    } else if (opt.set) {
        auto t = parse_time_of_day(*opt.set, true);
        if (!t || t->seconds != 0) {
            err << "error: invalid set time '" << *opt.set << "' (expected HH:MM)\n";
            return kExitUsage;
        }
        plan = plan_set(*t);
        origin = plan.first_frame - 500ms;
    }

    const std::int64_t frames = std::max<std::int64_t>(1, (*duration + 1s - 1ns) / 1s);
    const SimTime last_frame = origin + 500ms + std::chrono::seconds{frames - 1};
    const SimTime until = opt.sample == "second" ? last_frame : origin + *duration;

    ClockSimulation sim;
    try {
        sim = simulate_clock(cfg, plan.actions, until);
    } catch (const OscillationError& e) {
        err << "error oscillation " << e.what() << '\n';
        return kExitOscillation;
    }

    auto frame = [&](const DisplayLevels& levels, std::optional<SimTime> at) {
        if (at)
            out << format_duration(*at) << ' ';
        TimeOfDay t;
        try {
            t = decode_time(levels);
        } catch (const DecodeError&) {
            out << "??:??:?? " << detail::raw_pattern(levels) << '\n';
            return;
        }
        const LedMatrix m = layout == DisplayLayout::Traditional ? render_traditional(t) : render_bcd(t);
        out << to_string(t);
        if (opt.grid)
            out << '\n' << render_grid(m);
        else
            out << ' ' << render_line(m) << '\n';
    };

    if (opt.sample == "second") {
        for (std::int64_t k = 0; k < frames; ++k)
            frame(sample_display(sim.trace, origin + 500ms + std::chrono::seconds{k}), std::nullopt);
    } else {
        std::vector<SimTime> instants{origin};
        for (const auto& dn : kDisplayNets)
            for (const auto& p : sim.trace.points(dn.name))
                if (p.time > origin && p.time <= until)
                    instants.push_back(p.time);
        std::sort(instants.begin(), instants.end());
        instants.erase(std::unique(instants.begin(), instants.end()), instants.end());
        std::optional<TimeOfDay> shown;
        for (std::size_t i = 0; i < instants.size(); ++i) {
            const SimTime at = instants[i];
            if (i + 1 < instants.size() && instants[i + 1] - at < kSettleTime)
                continue; // ripple between counter halves
            const DisplayLevels levels = sample_display(sim.trace, at);
            std::optional<TimeOfDay> t;
            try {
                t = decode_time(levels);
            } catch (const DecodeError&) {
                continue; // rollover transient or not yet settled
            }
            if (shown == t)
                continue;
            shown = t;
            frame(levels, at);
        }
    }

    if (opt.trace_path && !detail::write_trace_file(*opt.trace_path, sim.trace, err))
        return kExitUsage;
    return kExitOk;
}

} // namespace binclock::cli
