#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "binclock/binclock.hpp"

namespace binclock::testing {

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline std::string asset(const std::string& name) { return std::string(BINCLOCK_ASSETS) + "/" + name; }
inline std::string data(const std::string& name) { return std::string(BINCLOCK_TEST_DATA) + "/" + name; }

/// Drops field values that last less than `min_dwell` (rollover and ripple
/// transients) and merges the equal neighbours left behind.
inline std::vector<FieldSample> settled(const std::vector<FieldSample>& history, SimTime min_dwell, SimTime end)
{
    std::vector<FieldSample> out;
    for (std::size_t i = 0; i < history.size(); ++i) {
        const SimTime stop = i + 1 < history.size() ? history[i + 1].time : end;
        if (stop - history[i].time < min_dwell)
            continue;
        if (out.empty() || out.back().value != history[i].value)
            out.push_back(history[i]);
    }
    return out;
}

/// Falling edges of a watched net.
inline std::vector<SimTime> falling_edges(const Trace& trace, std::string_view net)
{
    std::vector<SimTime> out;
    Level prev = Level::Unknown;
    for (const auto& p : trace.points(net)) {
        if (prev == Level::High && p.level == Level::Low)
            out.push_back(p.time);
        prev = p.level;
    }
    return out;
}

/// Random netlist that passes validation (not necessarily lint). Parameter
/// values are drawn from their legal ranges and written in canonical form.
inline Netlist random_valid_netlist(std::mt19937_64& rng)
{
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    Netlist nl;
    const std::size_t n_comp = 1 + pick(12);
    for (std::size_t i = 0; i < n_comp; ++i) {
        ComponentDecl c;
        c.name = "c" + std::to_string(i) + (pick(2) ? "_x" : "");
        c.kind = static_cast<DeviceKind>(pick(6));
        switch (c.kind) {
        case DeviceKind::Counter4:
            if (pick(2))
                c.params["init"] = std::to_string(pick(16));
            if (pick(2))
                c.params["delay_ns"] = std::to_string(pick(100));
            break;
        case DeviceKind::And2:
            if (pick(2))
                c.params["delay_ns"] = std::to_string(pick(100));
            break;
        case DeviceKind::Schmitt:
            if (pick(2))
                c.params["tau_us"] = std::to_string(pick(10000));
            if (pick(2)) {
                c.params["vt_hi"] = "0.75";
                c.params["vt_lo"] = "0.25";
            }
            break;
        case DeviceKind::Button: {
            const std::size_t n = pick(20);
            c.params["bounce_n"] = std::to_string(n);
            c.params["bounce_window_us"] = std::to_string(1 + n + pick(5000));
            c.params["seed"] = std::to_string(rng());
            break;
        }
        case DeviceKind::ClockSource:
            if (pick(2))
                c.params["freq_hz"] = std::to_string(1 + pick(1000));
            if (pick(2))
                c.params["duty"] = "0.25";
            break;
        case DeviceKind::Led: break;
        }
        nl.components.push_back(std::move(c));
    }

    // Each pin is placed on at most one net.
    std::vector<std::pair<std::string, std::string>> pins;
    for (const auto& c : nl.components)
        for (const auto& p : pins_of(c.kind))
            pins.emplace_back(c.name, std::string(p.name));
    std::shuffle(pins.begin(), pins.end(), rng);

    const std::size_t n_nets = pick(pins.size() + 1);
    for (std::size_t i = 0; i < n_nets; ++i) {
        NetDecl n;
        n.name = "n" + std::to_string(i);
        n.resolution = pick(3) == 0 ? Resolution::WiredOr : Resolution::Single;
        const std::size_t members = pick(4);
        for (std::size_t m = 0; m < members && !pins.empty(); ++m) {
            n.members.push_back(NetMember{pins.back().first, pins.back().second, {}});
            pins.pop_back();
        }
        if (n.resolution == Resolution::WiredOr && i > 0 && pick(2)) {
            // Diode from an earlier net, never from itself.
            n.members.push_back(NetMember{"n" + std::to_string(pick(i)), {}, {}});
        }
        nl.nets.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < nl.nets.size(); ++i)
        if (pick(3) == 0)
            nl.watches.push_back(WatchDecl{nl.nets[i].name, {}});
    return nl;
}

} // namespace binclock::testing
