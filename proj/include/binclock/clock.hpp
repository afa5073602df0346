#pragma once

// Reference model of the 24-hour binary clock: three dual 4-bit ripple
// counters (seconds, minutes, hours), AND-gate rollover resets at 60/60/24,
// two set buttons each debounced by an RC node and two Schmitt inverters, and
// diode-OR nodes merging the set buttons into the clock and reset lines.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "binclock/circuit.hpp"
#include "binclock/engine.hpp"
#include "binclock/netlist.hpp"
#include "binclock/stimulus.hpp"
#include "binclock/trace.hpp"

namespace binclock {

// ---------------------------------------------------------------------------
// Time of day and the behavioral oracle
// ---------------------------------------------------------------------------

struct TimeOfDay {
    int hours = 0;
    int minutes = 0;
    int seconds = 0;

    constexpr bool valid() const noexcept
    {
        return hours >= 0 && hours < 24 && minutes >= 0 && minutes < 60 && seconds >= 0 && seconds < 60;
    }

    constexpr std::int64_t to_seconds() const noexcept { return hours * 3600 + minutes * 60 + seconds; }

    static constexpr TimeOfDay from_seconds(std::int64_t s) noexcept
    {
        s %= 86'400;
        if (s < 0)
            s += 86'400;
        return TimeOfDay{static_cast<int>(s / 3600), static_cast<int>(s / 60 % 60), static_cast<int>(s % 60)};
    }

    friend constexpr bool operator==(const TimeOfDay&, const TimeOfDay&) = default;
};

inline std::string to_string(const TimeOfDay& t)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", t.hours, t.minutes, t.seconds);
    return buf;
}

namespace detail {

inline std::optional<int> two_digits(std::string_view s)
{
    if (s.size() != 2 || s[0] < '0' || s[0] > '9' || s[1] < '0' || s[1] > '9')
        return std::nullopt;
    return (s[0] - '0') * 10 + (s[1] - '0');
}

} // namespace detail

/// "HH:MM:SS", or "HH:MM" when `allow_short` (seconds then read as zero).
inline std::optional<TimeOfDay> parse_time_of_day(std::string_view text, bool allow_short = false)
{
    TimeOfDay t;
    if (text.size() == 8 && text[2] == ':' && text[5] == ':') {
        auto h = detail::two_digits(text.substr(0, 2));
        auto m = detail::two_digits(text.substr(3, 2));
        auto s = detail::two_digits(text.substr(6, 2));
        if (!h || !m || !s)
            return std::nullopt;
        t = TimeOfDay{*h, *m, *s};
    } else if (allow_short && text.size() == 5 && text[2] == ':') {
        auto h = detail::two_digits(text.substr(0, 2));
        auto m = detail::two_digits(text.substr(3, 2));
        if (!h || !m)
            return std::nullopt;
        t = TimeOfDay{*h, *m, 0};
    } else {
        return std::nullopt;
    }
    if (!t.valid())
        return std::nullopt;
    return t;
}

/// Behavioral clock: addition modulo one day.
inline TimeOfDay oracle_advance(TimeOfDay t, std::int64_t delta_seconds)
{
    if (!t.valid())
        throw std::invalid_argument("oracle_advance: invalid time " + to_string(t));
    if (delta_seconds < 0)
        throw std::invalid_argument("oracle_advance: negative delta");
    return TimeOfDay::from_seconds(t.to_seconds() + delta_seconds % 86'400);
}

// ---------------------------------------------------------------------------
// Display nets and decoding
// ---------------------------------------------------------------------------

enum class Field : std::uint8_t { Hours, Minutes, Seconds };

struct DisplayNet {
    Field field;
    unsigned weight;
    std::string_view name;
};

// The 17 LED nets, most significant first within each field.
inline constexpr std::array<DisplayNet, 17> kDisplayNets{{
    {Field::Hours, 16, "h16"},   {Field::Hours, 8, "h8"},     {Field::Hours, 4, "h4"},
    {Field::Hours, 2, "h2"},     {Field::Hours, 1, "h1"},     {Field::Minutes, 32, "m32"},
    {Field::Minutes, 16, "m16"}, {Field::Minutes, 8, "m8"},   {Field::Minutes, 4, "m4"},
    {Field::Minutes, 2, "m2"},   {Field::Minutes, 1, "m1"},   {Field::Seconds, 32, "s32"},
    {Field::Seconds, 16, "s16"}, {Field::Seconds, 8, "s8"},   {Field::Seconds, 4, "s4"},
    {Field::Seconds, 2, "s2"},   {Field::Seconds, 1, "s1"},
}};

inline constexpr int field_limit(Field f) noexcept { return f == Field::Hours ? 24 : 60; }

using DisplayLevels = std::map<std::string, Level, std::less<>>;

class DecodeError : public std::runtime_error {
public:
    enum class Reason { Unsettled, OutOfRange };

    DecodeError(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}

    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

/// Raw binary value of one field, -1 if any of its nets is Unknown.
inline int field_value(const DisplayLevels& levels, Field field)
{
    int value = 0;
    for (const auto& dn : kDisplayNets) {
        if (dn.field != field)
            continue;
        auto it = levels.find(dn.name);
        if (it == levels.end())
            throw std::invalid_argument("display level for '" + std::string(dn.name) + "' missing");
        if (it->second == Level::Unknown)
            return -1;
        if (it->second == Level::High)
            value += static_cast<int>(dn.weight);
    }
    return value;
}

/// Sums the weights of the lit LEDs per field. Unknown levels mean the
/// display has not settled; counts of 60 (or 24 for hours) are transient
/// rollover states. Both are reported as DecodeError.
inline TimeOfDay decode_time(const DisplayLevels& levels)
{
    int v[3];
    for (Field f : {Field::Hours, Field::Minutes, Field::Seconds}) {
        int value = field_value(levels, f);
        if (value < 0)
            throw DecodeError(DecodeError::Reason::Unsettled, "display has an undriven LED");
        if (value >= field_limit(f))
            throw DecodeError(DecodeError::Reason::OutOfRange,
                              "display field value " + std::to_string(value) + " is out of range");
        v[static_cast<int>(f)] = value;
    }
    return TimeOfDay{v[0], v[1], v[2]};
}

inline DisplayLevels sample_display(const Trace& trace, SimTime t)
{
    DisplayLevels levels;
    for (const auto& dn : kDisplayNets)
        levels.emplace(std::string(dn.name), trace.sample(dn.name, t));
    return levels;
}

inline TimeOfDay read_display(const Trace& trace, SimTime t) { return decode_time(sample_display(trace, t)); }

struct FieldSample {
    SimTime time{};
    int value = -1; // -1 while any bit is Unknown

    friend bool operator==(const FieldSample&, const FieldSample&) = default;
};

/// Every distinct value a field takes over the trace, with the instant it
/// took it. Simultaneous bit changes are merged.
inline std::vector<FieldSample> field_history(const Trace& trace, Field field)
{
    struct Bit {
        std::span<const Trace::Point> points;
        unsigned weight;
        std::size_t next = 0;
        Level level = Level::Unknown;
    };
    std::vector<Bit> bits;
    for (const auto& dn : kDisplayNets)
        if (dn.field == field)
            bits.push_back(Bit{trace.points(dn.name), dn.weight});

    std::vector<FieldSample> out;
    for (;;) {
        std::optional<SimTime> t;
        for (const auto& b : bits)
            if (b.next < b.points.size() && (!t || b.points[b.next].time < *t))
                t = b.points[b.next].time;
        if (!t)
            break;
        int value = 0;
        for (auto& b : bits) {
            if (b.next < b.points.size() && b.points[b.next].time == *t)
                b.level = b.points[b.next++].level;
            if (value >= 0) {
                if (b.level == Level::Unknown)
                    value = -1;
                else if (b.level == Level::High)
                    value += static_cast<int>(b.weight);
            }
        }
        if (out.empty() || out.back().value != value)
            out.push_back(FieldSample{*t, value});
    }
    return out;
}

// ---------------------------------------------------------------------------
// LED renderers
// ---------------------------------------------------------------------------

enum class DisplayLayout : std::uint8_t { Traditional, Bcd };

struct LedGroup {
    std::string label;
    std::vector<unsigned> weights; // most significant first
    std::vector<bool> lit;

    unsigned value() const
    {
        unsigned v = 0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (lit[i])
                v += weights[i];
        return v;
    }

    std::string bits() const
    {
        std::string s;
        for (bool b : lit)
            s += b ? '1' : '0';
        return s;
    }

    friend bool operator==(const LedGroup&, const LedGroup&) = default;
};

struct LedMatrix {
    DisplayLayout layout = DisplayLayout::Traditional;
    std::vector<LedGroup> groups;

    std::size_t cell_count() const
    {
        std::size_t n = 0;
        for (const auto& g : groups)
            n += g.lit.size();
        return n;
    }

    friend bool operator==(const LedMatrix&, const LedMatrix&) = default;
};

namespace detail {

inline LedGroup make_group(std::string label, unsigned width, unsigned value)
{
    LedGroup g{std::move(label), {}, {}};
    for (unsigned i = width; i-- > 0;) {
        g.weights.push_back(1u << i);
        g.lit.push_back(((value >> i) & 1u) != 0);
    }
    return g;
}

inline void check_time(const TimeOfDay& t)
{
    if (!t.valid())
        throw std::invalid_argument("invalid time of day " + to_string(t));
}

} // namespace detail

/// One row per field, each the plain binary value of that field.
inline LedMatrix render_traditional(const TimeOfDay& t)
{
    detail::check_time(t);
    return LedMatrix{DisplayLayout::Traditional,
                     {detail::make_group("H", 5, static_cast<unsigned>(t.hours)),
                      detail::make_group("M", 6, static_cast<unsigned>(t.minutes)),
                      detail::make_group("S", 6, static_cast<unsigned>(t.seconds))}};
}

/// Tens and ones digit of each field as separate binary columns.
inline LedMatrix render_bcd(const TimeOfDay& t)
{
    detail::check_time(t);
    auto u = [](int v) { return static_cast<unsigned>(v); };
    return LedMatrix{DisplayLayout::Bcd,
                     {detail::make_group("H-tens", 2, u(t.hours / 10)), detail::make_group("H-ones", 4, u(t.hours % 10)),
                      detail::make_group("M-tens", 3, u(t.minutes / 10)),
                      detail::make_group("M-ones", 4, u(t.minutes % 10)),
                      detail::make_group("S-tens", 3, u(t.seconds / 10)),
                      detail::make_group("S-ones", 4, u(t.seconds % 10))}};
}

/// Net levels the traditional display shows for `t`.
inline DisplayLevels display_levels(const TimeOfDay& t)
{
    const LedMatrix m = render_traditional(t);
    DisplayLevels levels;
    std::size_t i = 0;
    for (const auto& g : m.groups)
        for (bool b : g.lit)
            levels.emplace(std::string(kDisplayNets[i++].name), level_of(b));
    return levels;
}

/// Single line: groups separated by spaces, '*' lit, '.' unlit.
inline std::string render_line(const LedMatrix& m)
{
    std::string s;
    for (std::size_t i = 0; i < m.groups.size(); ++i) {
        if (i)
            s += ' ';
        for (bool b : m.groups[i].lit)
            s += b ? '*' : '.';
    }
    return s;
}

/// Fixed ASCII grid. Traditional: one right-aligned row per field. BCD: one
/// row per bit weight (8, 4, 2, 1) with a column per digit.
inline std::string render_grid(const LedMatrix& m)
{
    std::string out;
    if (m.layout == DisplayLayout::Traditional) {
        for (const auto& g : m.groups) {
            out += g.label;
            out += ' ';
            out.append(6 - g.lit.size(), ' ');
            for (bool b : g.lit)
                out += b ? '*' : '.';
            out += '\n';
        }
        return out;
    }
    for (unsigned w : {8u, 4u, 2u, 1u}) {
        out += static_cast<char>('0' + w);
        out += ' ';
        for (std::size_t gi = 0; gi < m.groups.size(); ++gi) {
            if (gi && gi % 2 == 0)
                out += ' ';
            const auto& g = m.groups[gi];
            char c = ' ';
            for (std::size_t i = 0; i < g.weights.size(); ++i)
                if (g.weights[i] == w)
                    c = g.lit[i] ? '*' : '.';
            out += c;
        }
        while (!out.empty() && out.back() == ' ')
            out.pop_back();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference circuit
// ---------------------------------------------------------------------------

inline constexpr std::string_view kHoursButton = "btn_h";
inline constexpr std::string_view kMinutesButton = "btn_m";
inline constexpr std::string_view kClockNet = "clk_1hz";
inline constexpr std::string_view kSecondsResetNet = "sec_mr";
inline constexpr std::string_view kMinutesClockNet = "min_cp";
inline constexpr std::string_view kMinutesResetNet = "min_mr";
inline constexpr std::string_view kHoursClockNet = "hr_cp";
inline constexpr std::string_view kHoursResetNet = "hr_mr";
inline constexpr std::string_view kHoursSetNet = "h_set";
inline constexpr std::string_view kMinutesSetNet = "m_set";

struct ButtonSettings {
    int bounce_n = 8;
    SimTime bounce_window = 2ms;
    std::uint64_t seed = 1;
};

struct ClockCircuitConfig {
    ButtonSettings hours_button{8, 2ms, 1};
    ButtonSettings minutes_button{8, 2ms, 2};
    double tau_us = 4700.0; // 47 kOhm x 100 nF
    double vt_hi = 0.6;
    double vt_lo = 0.4;
    SimTime gate_delay = 10ns;
    SimTime counter_delay = 20ns;
    TimeOfDay initial{};
    bool debounce = true; // false wires the buttons straight to the set nets

    SimConfig sim_config(SimTime t_end) const
    {
        SimConfig c;
        c.gate_delay = gate_delay;
        c.counter_delay = counter_delay;
        c.t_end = t_end;
        return c;
    }
};

namespace detail {

inline std::string format_number(double v)
{
    if (v == std::floor(v) && std::fabs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

struct NetlistBuilder {
    Netlist nl;

    void comp(std::string name, DeviceKind kind, std::map<std::string, std::string> params = {})
    {
        nl.components.push_back(ComponentDecl{std::move(name), kind, std::move(params), {}, {}});
    }

    void net(std::string name, std::initializer_list<std::string_view> members, bool wired_or = false)
    {
        NetDecl n{std::move(name), wired_or ? Resolution::WiredOr : Resolution::Single, {}, {}};
        for (std::string_view m : members) {
            auto dot = m.find('.');
            if (dot == std::string_view::npos)
                n.members.push_back(NetMember{std::string(m), {}, {}});
            else
                n.members.push_back(NetMember{std::string(m.substr(0, dot)), std::string(m.substr(dot + 1)), {}});
        }
        nl.nets.push_back(std::move(n));
    }
};

inline std::map<std::string, std::string> counter_params(int init)
{
    if (init == 0)
        return {};
    return {{"init", std::to_string(init)}};
}

} // namespace detail

/// Emits the clock as a netlist. Each time field is a pair of counter halves
/// chained low.q3 -> high.cp. Seconds and minutes clear through a chained
/// 3-gate AND over weights 4, 8, 16, 32 (= 60); hours clear through one AND
/// over weights 8 and 16 (= 24). Weight 32 of one field clocks the next
/// through a diode-OR shared with that field's set button; a set button also
/// holds the previous field in reset while pressed.
inline Netlist build_clock_circuit(const ClockCircuitConfig& cfg = {})
{
    if (!cfg.initial.valid())
        throw std::invalid_argument("initial time out of range");
    using K = DeviceKind;
    detail::NetlistBuilder b;

    b.comp("clk", K::ClockSource, {{"freq_hz", "1"}, {"duty", "0.5"}});

    struct FieldSpec {
        std::string prefix; // component prefix
        std::string net;    // display net prefix
        int value;
    };
    const FieldSpec fields[] = {{"sec", "s", cfg.initial.seconds},
                                {"min", "m", cfg.initial.minutes},
                                {"hr", "h", cfg.initial.hours}};
    for (const auto& f : fields) {
        b.comp(f.prefix + "_lo", K::Counter4, detail::counter_params(f.value & 15));
        b.comp(f.prefix + "_hi", K::Counter4, detail::counter_params(f.value >> 4));
        if (f.prefix == "hr") {
            b.comp("hr_and", K::And2);
        } else {
            for (int g = 1; g <= 3; ++g)
                b.comp(f.prefix + "_and" + std::to_string(g), K::And2);
        }
    }

    auto button = [&](const std::string& name, const ButtonSettings& s) {
        b.comp(name, K::Button,
               {{"bounce_n", std::to_string(s.bounce_n)},
                {"bounce_window_us", detail::format_number(static_cast<double>(s.bounce_window.count()) / 1e3)},
                {"seed", std::to_string(s.seed)}});
    };
    auto schmitt = [&](const std::string& name, double tau_us) {
        b.comp(name, K::Schmitt,
               {{"tau_us", detail::format_number(tau_us)},
                {"vt_hi", detail::format_number(cfg.vt_hi)},
                {"vt_lo", detail::format_number(cfg.vt_lo)}});
    };
    button(std::string(kHoursButton), cfg.hours_button);
    if (cfg.debounce) {
        schmitt("deb_h1", cfg.tau_us);
        schmitt("deb_h2", 0.0);
    }
    button(std::string(kMinutesButton), cfg.minutes_button);
    if (cfg.debounce) {
        schmitt("deb_m1", cfg.tau_us);
        schmitt("deb_m2", 0.0);
    }
    for (const auto& dn : kDisplayNets)
        b.comp("led_" + std::string(dn.name), K::Led);

    // Seconds.
    b.net(std::string(kClockNet), {"clk.out", "sec_lo.cp"});
    b.net("s1", {"sec_lo.q0", "led_s1.in"});
    b.net("s2", {"sec_lo.q1", "led_s2.in"});
    b.net("s4", {"sec_lo.q2", "sec_and1.a", "led_s4.in"});
    b.net("s8", {"sec_lo.q3", "sec_and1.b", "sec_hi.cp", "led_s8.in"});
    b.net("s16", {"sec_hi.q0", "sec_and2.b", "led_s16.in"});
    b.net("s32", {"sec_hi.q1", "sec_and3.b", "led_s32.in"});
    b.net("sec_and1_y", {"sec_and1.y", "sec_and2.a"});
    b.net("sec_and2_y", {"sec_and2.y", "sec_and3.a"});
    b.net(std::string(kSecondsResetNet), {"sec_and3.y", kMinutesSetNet, "sec_lo.mr", "sec_hi.mr"}, true);

    // Minutes.
    b.net(std::string(kMinutesClockNet), {"s32", kMinutesSetNet, "min_lo.cp"}, true);
    b.net("m1", {"min_lo.q0", "led_m1.in"});
    b.net("m2", {"min_lo.q1", "led_m2.in"});
    b.net("m4", {"min_lo.q2", "min_and1.a", "led_m4.in"});
    b.net("m8", {"min_lo.q3", "min_and1.b", "min_hi.cp", "led_m8.in"});
    b.net("m16", {"min_hi.q0", "min_and2.b", "led_m16.in"});
    b.net("m32", {"min_hi.q1", "min_and3.b", "led_m32.in"});
    b.net("min_and1_y", {"min_and1.y", "min_and2.a"});
    b.net("min_and2_y", {"min_and2.y", "min_and3.a"});
    b.net(std::string(kMinutesResetNet), {"min_and3.y", kHoursSetNet, "min_lo.mr", "min_hi.mr"}, true);

    // Hours.
    b.net(std::string(kHoursClockNet), {"m32", kHoursSetNet, "hr_lo.cp"}, true);
    b.net("h1", {"hr_lo.q0", "led_h1.in"});
    b.net("h2", {"hr_lo.q1", "led_h2.in"});
    b.net("h4", {"hr_lo.q2", "led_h4.in"});
    b.net("h8", {"hr_lo.q3", "hr_and.a", "hr_hi.cp", "led_h8.in"});
    b.net("h16", {"hr_hi.q0", "hr_and.b", "led_h16.in"});
    b.net(std::string(kHoursResetNet), {"hr_and.y", "hr_lo.mr", "hr_hi.mr"});

    // Set buttons.
    if (cfg.debounce) {
        b.net("btn_h_raw", {"btn_h.out", "deb_h1.in"});
        b.net("btn_h_inv", {"deb_h1.out", "deb_h2.in"});
        b.net(std::string(kHoursSetNet), {"deb_h2.out"});
        b.net("btn_m_raw", {"btn_m.out", "deb_m1.in"});
        b.net("btn_m_inv", {"deb_m1.out", "deb_m2.in"});
        b.net(std::string(kMinutesSetNet), {"deb_m2.out"});
    } else {
        b.net(std::string(kHoursSetNet), {"btn_h.out"});
        b.net(std::string(kMinutesSetNet), {"btn_m.out"});
    }

    for (const auto& dn : kDisplayNets)
        b.nl.watches.push_back(WatchDecl{std::string(dn.name), {}});
    return std::move(b.nl);
}

// ---------------------------------------------------------------------------
// Set procedure
// ---------------------------------------------------------------------------

/// Hours presses first, then minutes presses, on one steady cadence of
/// `press` held and `gap` released. Each hours press zeroes the minutes and
/// each minutes press zeroes the seconds; a release advances the field.
inline std::vector<ButtonAction> make_set_script(const TimeOfDay& target, SimTime start_at, SimTime press = 50ms,
                                                 SimTime gap = 200ms)
{
    detail::check_time(target);
    if (press.count() <= 0 || gap.count() <= 0)
        throw std::invalid_argument("press and gap must be positive");
    std::vector<ButtonAction> out;
    SimTime t = start_at;
    auto presses = [&](std::string_view button, int n) {
        for (int i = 0; i < n; ++i) {
            out.push_back(ButtonAction{t, std::string(button), true});
            out.push_back(ButtonAction{t + press, std::string(button), false});
            t += press + gap;
        }
    };
    presses(kHoursButton, target.hours);
    presses(kMinutesButton, target.minutes);
    return out;
}

struct SetPlan {
    std::vector<ButtonAction> actions;
    SimTime start_at{};
    SimTime last_release{};
    SimTime first_frame{}; // first mid-second sample after the set completes
};

/// Schedules the set script so the final release lands 100 ms after a
/// whole-second clock edge: the user waits for the tick, then lets go. The
/// seconds field then starts from zero and the next mid-second sample reads
/// exactly hh:mm:00.
inline SetPlan plan_set(const TimeOfDay& target, SimTime press = 50ms, SimTime gap = 200ms)
{
    const int n = target.hours + target.minutes;
    SetPlan plan;
    if (n == 0) {
        plan.first_frame = 500ms;
        return plan;
    }
    constexpr SimTime second = 1s;
    const SimTime span = (press + gap) * (n - 1) + press;
    SimTime start = ((100ms - span) % second + second) % second;
    if (start < 100ms)
        start += second;
    plan.start_at = start;
    plan.actions = make_set_script(target, start, press, gap);
    plan.last_release = plan.actions.back().time;
    plan.first_frame = (plan.last_release / second) * second + 500ms;
    return plan;
}

struct ClockSimulation {
    Circuit circuit;
    Trace trace;
    EngineStats stats;
};

/// Builds, elaborates and runs the reference clock with the given button
/// actions up to `until`. The trace holds the display nets plus `extra_watch`.
inline ClockSimulation simulate_clock(const ClockCircuitConfig& cfg, std::span<const ButtonAction> actions,
                                      SimTime until, std::span<const std::string> extra_watch = {})
{
    ClockSimulation sim{elaborate(build_clock_circuit(cfg)), {}, {}};
    SimConfig sc = cfg.sim_config(until);
    if (!extra_watch.empty()) {
        for (const auto& dn : kDisplayNets)
            sc.watched.emplace_back(dn.name);
        sc.watched.insert(sc.watched.end(), extra_watch.begin(), extra_watch.end());
    }
    Engine engine(sim.circuit, std::move(sc));
    for (const auto& e : expand_button_actions(sim.circuit, actions))
        engine.inject(e);
    engine.run_until(until);
    sim.stats = engine.stats();
    sim.trace = engine.take_trace();
    return sim;
}

} // namespace binclock
