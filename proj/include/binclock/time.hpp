#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace binclock {

// Simulation time in integer nanoseconds since the start of a run. A full
// day (86'400 s) is ~8.6e13 ns, far inside the 64-bit range.
using SimTime = std::chrono::nanoseconds;

inline constexpr SimTime kOneDay = std::chrono::seconds{86'400};

/// Parses "<number><unit>" with unit one of ns, us, ms, s. Decimal fractions
/// are accepted when they resolve to a whole number of nanoseconds
/// ("1.5s" is fine, "0.5ns" is not). Returns nullopt on anything else.
inline std::optional<SimTime> parse_duration(std::string_view text)
{
    std::int64_t scale = 0;
    std::string_view number;
    auto ends_with = [&](std::string_view suffix) {
        return text.size() > suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
    };
    if (ends_with("ns")) {
        scale = 1;
        number = text.substr(0, text.size() - 2);
    } else if (ends_with("us")) {
        scale = 1'000;
        number = text.substr(0, text.size() - 2);
    } else if (ends_with("ms")) {
        scale = 1'000'000;
        number = text.substr(0, text.size() - 2);
    } else if (ends_with("s")) {
        scale = 1'000'000'000;
        number = text.substr(0, text.size() - 1);
    } else {
        return std::nullopt;
    }

    auto dot = number.find('.');
    std::string_view whole = number.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : number.substr(dot + 1);
    if (whole.empty() || (dot != std::string_view::npos && frac.empty()))
        return std::nullopt;

    std::int64_t w = 0;
    auto [wp, wec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
    if (wec != std::errc{} || wp != whole.data() + whole.size() || w < 0)
        return std::nullopt;
    if (w > std::numeric_limits<std::int64_t>::max() / scale)
        return std::nullopt;
    std::int64_t ns = w * scale;

    std::int64_t place = scale;
    for (char c : frac) {
        if (c < '0' || c > '9')
            return std::nullopt;
        int digit = c - '0';
        if (place % 10 != 0) {
            if (digit != 0)
                return std::nullopt;
            continue;
        }
        place /= 10;
        ns += digit * place;
    }
    return SimTime{ns};
}

/// Shortest exact rendering using the largest unit that divides the value.
inline std::string format_duration(SimTime t)
{
    const std::int64_t ns = t.count();
    if (ns != 0 && ns % 1'000'000'000 == 0)
        return std::to_string(ns / 1'000'000'000) + "s";
    if (ns != 0 && ns % 1'000'000 == 0)
        return std::to_string(ns / 1'000'000) + "ms";
    if (ns != 0 && ns % 1'000 == 0)
        return std::to_string(ns / 1'000) + "us";
    return std::to_string(ns) + "ns";
}

} // namespace binclock
