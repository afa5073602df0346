#pragma once

#include <compare>
#include <cstdint>
#include <functional>

#include "binclock/level.hpp"
#include "binclock/time.hpp"

namespace binclock {

// Dense index into a circuit's net table.
struct NetId {
    std::uint32_t index = 0;

    friend constexpr auto operator<=>(NetId, NetId) = default;
};

struct Event {
    SimTime time{};
    NetId net{};
    Level level = Level::Unknown;

    friend constexpr bool operator==(const Event&, const Event&) = default;
};

} // namespace binclock

template <>
struct std::hash<binclock::NetId> {
    std::size_t operator()(binclock::NetId id) const noexcept { return std::hash<std::uint32_t>{}(id.index); }
};
