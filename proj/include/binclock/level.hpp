#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

namespace binclock {

// Three-valued net level. Unknown is the power-on state of every net until
// something drives it.
enum class Level : std::uint8_t { Low, High, Unknown };

enum class Edge : std::uint8_t { None, Rising, Falling };

constexpr Edge edge_of(Level prev, Level next) noexcept
{
    if (prev == Level::High && next == Level::Low)
        return Edge::Falling;
    if (prev == Level::Low && next == Level::High)
        return Edge::Rising;
    return Edge::None;
}

constexpr Level level_of(bool b) noexcept { return b ? Level::High : Level::Low; }

constexpr bool is_known(Level l) noexcept { return l != Level::Unknown; }

constexpr char to_char(Level l) noexcept
{
    switch (l) {
    case Level::Low: return '0';
    case Level::High: return '1';
    default: return 'X';
    }
}

constexpr std::string_view to_string(Level l) noexcept
{
    switch (l) {
    case Level::Low: return "low";
    case Level::High: return "high";
    default: return "unknown";
    }
}

constexpr std::string_view to_string(Edge e) noexcept
{
    switch (e) {
    case Edge::Rising: return "rising";
    case Edge::Falling: return "falling";
    default: return "none";
    }
}

/// Diode-OR with pull-down: any High wins, otherwise an undriven (Unknown)
/// contributor keeps the node undetermined, otherwise the pull-down gives Low.
constexpr Level resolve_wired_or(std::span<const Level> drivers)
{
    if (drivers.empty())
        throw std::invalid_argument("resolve_wired_or: empty driver list");
    bool unknown = false;
    for (Level d : drivers) {
        if (d == Level::High)
            return Level::High;
        if (d == Level::Unknown)
            unknown = true;
    }
    return unknown ? Level::Unknown : Level::Low;
}

} // namespace binclock
