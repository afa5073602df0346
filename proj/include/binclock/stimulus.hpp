#pragma once

// Stimulus script format, one action per line, times non-decreasing:
//
//   <time><unit> press <button>
//   <time><unit> release <button>
//   <time><unit> set <net> high|low
//
// Units are ns, us, ms, s. '#' starts a comment.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "binclock/circuit.hpp"
#include "binclock/devices.hpp"
#include "binclock/netlist.hpp"

namespace binclock {

struct ButtonAction {
    SimTime time{};
    std::string button;
    bool press = true;

    friend bool operator==(const ButtonAction&, const ButtonAction&) = default;
};

struct NetAssignment {
    SimTime time{};
    std::string net;
    Level level = Level::Low;

    friend bool operator==(const NetAssignment&, const NetAssignment&) = default;
};

struct StimulusScript {
    std::vector<ButtonAction> buttons;
    std::vector<NetAssignment> assignments;
};

struct StimulusParseResult {
    std::optional<StimulusScript> script;
    std::vector<Diagnostic> diagnostics;
};

inline StimulusParseResult parse_stimulus(std::string_view text)
{
    StimulusParseResult result;
    StimulusScript script;
    auto error = [&](std::string message, SourceLoc loc) {
        result.diagnostics.push_back(Diagnostic{Severity::Error, std::string(diag::kSyntax), std::move(message), loc});
    };

    SimTime last{0};
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        auto toks = detail::tokenize_line(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (toks.empty())
            continue;
        auto loc = [&](std::size_t i) { return SourceLoc{line_no, toks[i].column}; };

        auto t = parse_duration(toks[0].text);
        if (!t) {
            error("bad time '" + std::string(toks[0].text) + "'", loc(0));
            continue;
        }
        if (*t < last) {
            error("time goes backwards", loc(0));
            continue;
        }
        if (toks.size() < 3) {
            error("expected an action after the time", loc(0));
            continue;
        }
        std::string_view verb = toks[1].text;
        if ((verb == "press" || verb == "release") && toks.size() == 3) {
            script.buttons.push_back(ButtonAction{*t, std::string(toks[2].text), verb == "press"});
        } else if (verb == "set" && toks.size() == 4 && (toks[3].text == "high" || toks[3].text == "low")) {
            script.assignments.push_back(
                NetAssignment{*t, std::string(toks[2].text), toks[3].text == "high" ? Level::High : Level::Low});
        } else {
            error("expected 'press <button>', 'release <button>' or 'set <net> high|low'", loc(1));
            continue;
        }
        last = *t;
    }
    if (result.diagnostics.empty())
        result.script = std::move(script);
    return result;
}

/// Turns press/release actions into contact events on each button's output
/// net, using the button's own bounce parameters. The k-th press of a button
/// bounces with press_seed(seed, k). A trailing press with no release yields
/// just the closing train.
inline std::vector<Event> expand_button_actions(const Circuit& circuit, std::span<const ButtonAction> actions)
{
    struct Open {
        SimTime press_at{};
        bool pressed = false;
        std::uint64_t index = 0;
        std::optional<SimTime> quiet_after;
    };
    std::map<std::string, Open, std::less<>> state;
    std::vector<Event> out;

    auto lookup = [&](const std::string& name) -> std::pair<NetId, BounceSpec> {
        auto d = circuit.find_device(name);
        if (!d || circuit.devices[*d].kind != DeviceKind::Button)
            throw std::invalid_argument("no button named '" + name + "'");
        const auto& dev = circuit.devices[*d];
        if (!dev.pins[0])
            throw std::invalid_argument("button '" + name + "' is not connected");
        return {*dev.pins[0], std::get<ButtonDeviceConfig>(dev.config).bounce};
    };

    for (const auto& a : actions) {
        auto [net, spec] = lookup(a.button);
        Open& st = state[a.button];
        if (a.press) {
            if (st.pressed)
                throw std::invalid_argument("button '" + a.button + "' pressed twice without release");
            if (st.quiet_after && a.time <= *st.quiet_after)
                throw std::invalid_argument("button '" + a.button + "' pressed inside the previous release bounce");
            st.pressed = true;
            st.press_at = a.time;
        } else {
            if (!st.pressed)
                throw std::invalid_argument("button '" + a.button + "' released without a press");
            spec.seed = press_seed(spec.seed, st.index++);
            auto evs = gen_button_events(net, st.press_at, a.time, spec);
            out.insert(out.end(), evs.begin(), evs.end());
            st.pressed = false;
            st.quiet_after = a.time + spec.bounce_window;
        }
    }
    for (auto& [name, st] : state) {
        if (!st.pressed)
            continue;
        auto [net, spec] = lookup(name);
        spec.seed = press_seed(spec.seed, st.index);
        auto evs = gen_press_events(net, st.press_at, spec);
        out.insert(out.end(), evs.begin(), evs.end());
    }
    std::stable_sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    return out;
}

inline std::vector<Event> compile_stimulus(const Circuit& circuit, const StimulusScript& script)
{
    std::vector<Event> out = expand_button_actions(circuit, script.buttons);
    for (const auto& a : script.assignments) {
        auto id = circuit.find_net(a.net);
        if (!id)
            throw std::invalid_argument("no net named '" + a.net + "'");
        out.push_back(Event{a.time, *id, a.level});
    }
    std::stable_sort(out.begin(), out.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    return out;
}

} // namespace binclock
