#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "binclock/event.hpp"

namespace binclock {

using namespace std::chrono_literals;

// ---------------------------------------------------------------------------
// Combinational
// ---------------------------------------------------------------------------

/// Three-valued AND: a Low input dominates, Unknown otherwise poisons.
constexpr Level and2_eval(Level a, Level b) noexcept
{
    if (a == Level::Low || b == Level::Low)
        return Level::Low;
    if (a == Level::High && b == Level::High)
        return Level::High;
    return Level::Unknown;
}

// ---------------------------------------------------------------------------
// Ripple counter half (one 4-bit section of a dual binary counter)
// ---------------------------------------------------------------------------

struct CounterHalf {
    std::uint8_t value = 0; // 0..15
    Level last_clock = Level::Unknown;

    /// Output bit `bit` (0 = weight 1 ... 3 = weight 8).
    constexpr Level q(int bit) const noexcept { return level_of(((value >> bit) & 1u) != 0); }

    friend constexpr bool operator==(const CounterHalf&, const CounterHalf&) = default;
};

/// Master reset is asynchronous and dominates; otherwise the count advances on
/// a High->Low clock transition. Unknown on either side of the clock is not
/// an edge, and releasing the reset is not a clock event.
constexpr CounterHalf counter_half_step(CounterHalf state, Level clock_now, Level mr_now) noexcept
{
    CounterHalf next = state;
    next.last_clock = clock_now;
    if (mr_now == Level::High)
        next.value = 0;
    else if (edge_of(state.last_clock, clock_now) == Edge::Falling)
        next.value = static_cast<std::uint8_t>((state.value + 1) & 0x0f);
    return next;
}

// ---------------------------------------------------------------------------
// RC node + inverting Schmitt trigger
// ---------------------------------------------------------------------------

struct SchmittParams {
    SimTime tau = 4'700us; // 47 kOhm x 100 nF; zero means no RC (pure inverter)
    double vt_hi = 0.6;
    double vt_lo = 0.4;
};

struct SchmittRcState {
    double node_voltage = 0.0; // fraction of supply
    Level output = Level::Unknown;
    std::optional<SimTime> pending_crossing;
};

inline void check_thresholds(double vt_hi, double vt_lo)
{
    if (!(vt_lo > 0.0 && vt_hi < 1.0 && vt_lo < vt_hi))
        throw std::invalid_argument("schmitt thresholds must satisfy 0 < vt_lo < vt_hi < 1");
}

/// Node voltage after relaxing for `dt` toward the rail selected by `drive`.
/// An undriven node holds its charge.
inline double rc_relax(double v0, Level drive, SimTime dt, SimTime tau)
{
    if (drive == Level::Unknown)
        return v0;
    const double target = drive == Level::High ? 1.0 : 0.0;
    if (tau.count() <= 0)
        return target;
    return target + (v0 - target) * std::exp(-static_cast<double>(dt.count()) / static_cast<double>(tau.count()));
}

/// Time until the node, relaxing toward `drive`, reaches the threshold in its
/// direction of travel (vt_hi when charging, vt_lo when discharging). Zero if
/// it sits exactly on the threshold, nullopt if the threshold is behind it or
/// the node is undriven. Rounded up to whole nanoseconds, so the node is at or
/// past the threshold at the returned instant.
inline std::optional<SimTime> schmitt_crossing_time(const SchmittRcState& state, Level drive, SimTime tau,
                                                    double vt_hi, double vt_lo)
{
    check_thresholds(vt_hi, vt_lo);
    if (tau.count() <= 0)
        throw std::invalid_argument("schmitt_crossing_time: tau must be positive");
    if (drive == Level::Unknown)
        return std::nullopt;

    const double v0 = state.node_voltage;
    const double target = drive == Level::High ? 1.0 : 0.0;
    const double thresh = drive == Level::High ? vt_hi : vt_lo;
    if (v0 == thresh)
        return SimTime{0};
    const bool before = drive == Level::High ? v0 < thresh : v0 > thresh;
    if (!before)
        return std::nullopt;

    const double dt = static_cast<double>(tau.count()) * std::log((v0 - target) / (thresh - target));
    return SimTime{static_cast<std::int64_t>(std::ceil(dt))};
}

/// Inverting output with hysteresis.
constexpr Level schmitt_output(Level output_prev, double v_now, double vt_hi, double vt_lo) noexcept
{
    if (v_now >= vt_hi)
        return Level::Low;
    if (v_now <= vt_lo)
        return Level::High;
    return output_prev;
}

// ---------------------------------------------------------------------------
// Push button with contact bounce
// ---------------------------------------------------------------------------

struct BounceSpec {
    int n_bounces = 0;
    SimTime bounce_window = 2ms;
    std::uint64_t seed = 0;
    Level closed_level = Level::High; // rail the closed contact drives
};

/// Seed for the k-th press of a button whose base seed is `seed`
/// (golden-ratio stride, so consecutive presses bounce differently).
constexpr std::uint64_t press_seed(std::uint64_t seed, std::uint64_t press_index) noexcept
{
    return seed + press_index * 0x9e3779b97f4a7c15ull;
}

namespace detail {

constexpr Level invert(Level l) noexcept
{
    return l == Level::High ? Level::Low : l == Level::Low ? Level::High : Level::Unknown;
}

// Bounce offsets: 2n distinct values drawn as 1 + (mt19937_64() mod window_ns),
// duplicates redrawn, then sorted ascending. std::mt19937_64 output is fixed
// by the C++ standard, so the sequence is identical on every platform.
inline std::vector<std::int64_t> bounce_offsets(int n_bounces, SimTime window, std::mt19937_64& rng)
{
    const auto count = static_cast<std::size_t>(2 * n_bounces);
    const auto w = static_cast<std::uint64_t>(window.count());
    std::vector<std::int64_t> out;
    out.reserve(count);
    while (out.size() < count) {
        auto candidate = static_cast<std::int64_t>(1 + rng() % w);
        if (std::find(out.begin(), out.end(), candidate) == out.end())
            out.push_back(candidate);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline void append_train(std::vector<Event>& out, NetId net, SimTime start, Level final_level,
                         const BounceSpec& spec, std::mt19937_64& rng)
{
    out.push_back(Event{start, net, final_level});
    Level level = final_level;
    for (std::int64_t offset : bounce_offsets(spec.n_bounces, spec.bounce_window, rng)) {
        level = invert(level);
        out.push_back(Event{start + SimTime{offset}, net, level});
    }
}

inline void check_bounce_spec(const BounceSpec& spec)
{
    if (spec.n_bounces < 0)
        throw std::invalid_argument("bounce count must be non-negative");
    if (spec.bounce_window.count() <= 0 || spec.bounce_window.count() < 2 * static_cast<std::int64_t>(spec.n_bounces))
        throw std::invalid_argument("bounce window too short for the requested bounce count");
    if (!is_known(spec.closed_level))
        throw std::invalid_argument("closed level must be High or Low");
}

} // namespace detail

/// Contact train for a single closure: the nominal press at `press_at` plus
/// 2n bounce toggles inside the window, ending on the closed rail.
inline std::vector<Event> gen_press_events(NetId net, SimTime press_at, const BounceSpec& spec)
{
    detail::check_bounce_spec(spec);
    std::mt19937_64 rng(spec.seed);
    std::vector<Event> out;
    detail::append_train(out, net, press_at, spec.closed_level, spec, rng);
    return out;
}

/// Press and release trains. The release train mirrors the press train and
/// ends on the open rail. Both draw from one generator seeded with spec.seed.
inline std::vector<Event> gen_button_events(NetId net, SimTime press_at, SimTime release_at, const BounceSpec& spec)
{
    detail::check_bounce_spec(spec);
    if (press_at + spec.bounce_window >= release_at)
        throw std::invalid_argument("button release overlaps the press bounce window");
    std::mt19937_64 rng(spec.seed);
    std::vector<Event> out;
    out.reserve(static_cast<std::size_t>(4 * spec.n_bounces + 2));
    detail::append_train(out, net, press_at, spec.closed_level, spec, rng);
    detail::append_train(out, net, release_at, detail::invert(spec.closed_level), spec, rng);
    return out;
}

// ---------------------------------------------------------------------------
// Ideal square-wave source
// ---------------------------------------------------------------------------

struct ClockSourceSpec {
    double frequency_hz = 1.0;
    double duty = 0.5;
};

inline SimTime clock_period(const ClockSourceSpec& spec)
{
    if (!(spec.frequency_hz > 0.0))
        throw std::invalid_argument("clock frequency must be positive");
    if (!(spec.duty > 0.0 && spec.duty < 1.0))
        throw std::invalid_argument("clock duty must be in (0, 1)");
    auto period = static_cast<std::int64_t>(std::llround(1e9 / spec.frequency_hz));
    if (period < 2)
        throw std::invalid_argument("clock period below 2 ns");
    return SimTime{period};
}

inline SimTime clock_high_time(const ClockSourceSpec& spec)
{
    const SimTime period = clock_period(spec);
    auto high = std::llround(static_cast<double>(period.count()) * spec.duty);
    high = std::clamp<long long>(high, 1, period.count() - 1);
    return SimTime{high};
}

/// The source idles Low from t = 0 and each period ends with its falling
/// edge, so falling edges land on whole multiples of the period. Transition
/// k (0-based) is a rise for even k and a fall for odd k.
inline SimTime clock_transition_time(const ClockSourceSpec& spec, std::uint64_t k)
{
    const SimTime period = clock_period(spec);
    const SimTime high = clock_high_time(spec);
    const auto cycle = static_cast<std::int64_t>(k / 2);
    if (k % 2 == 0)
        return period * cycle + (period - high);
    return period * (cycle + 1);
}

constexpr Level clock_transition_level(std::uint64_t k) noexcept { return k % 2 == 0 ? Level::High : Level::Low; }

inline std::vector<Event> gen_clock_events(NetId net, const ClockSourceSpec& spec, SimTime until)
{
    std::vector<Event> out;
    for (std::uint64_t k = 0;; ++k) {
        SimTime t = clock_transition_time(spec, k);
        if (t > until)
            break;
        out.push_back(Event{t, net, clock_transition_level(k)});
    }
    return out;
}

} // namespace binclock
