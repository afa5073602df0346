#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "binclock/event.hpp"

namespace binclock {

// Change-point record of a fixed set of watched nets. Per net, points are
// strictly increasing in time and consecutive levels differ; a net reads
// Unknown before its first point.
class Trace {
public:
    struct Point {
        SimTime time{};
        Level level = Level::Unknown;

        friend bool operator==(const Point&, const Point&) = default;
    };

    struct Channel {
        NetId net{};
        std::string name;
        std::vector<Point> points;

        friend bool operator==(const Channel&, const Channel&) = default;
    };

    std::size_t add_channel(NetId net, std::string name)
    {
        if (find(net) != npos)
            throw std::logic_error("net '" + name + "' is already watched");
        channels_.push_back(Channel{net, std::move(name), {}});
        return channels_.size() - 1;
    }

    /// Appends a change point. A second write at the same instant replaces
    /// the first; writes that do not change the level are dropped.
    void record(std::size_t channel, SimTime t, Level level)
    {
        auto& pts = channels_.at(channel).points;
        if (!pts.empty() && t < pts.back().time)
            throw std::logic_error("trace time went backwards on net '" + channels_[channel].name + "'");
        if (!pts.empty() && pts.back().time == t) {
            pts.back().level = level;
            Level before = pts.size() >= 2 ? pts[pts.size() - 2].level : Level::Unknown;
            if (before == level)
                pts.pop_back();
            return;
        }
        Level current = pts.empty() ? Level::Unknown : pts.back().level;
        if (current != level)
            pts.push_back(Point{t, level});
    }

    Level sample(NetId net, SimTime t) const { return sample_points(checked(net).points, t); }

    Level sample(std::string_view name, SimTime t) const { return sample_points(checked(name).points, t); }

    std::span<const Point> points(NetId net) const { return checked(net).points; }
    std::span<const Point> points(std::string_view name) const { return checked(name).points; }

    bool is_watched(NetId net) const { return find(net) != npos; }
    bool is_watched(std::string_view name) const { return find(name) != npos; }

    std::span<const Channel> channels() const { return channels_; }

    std::size_t total_points() const
    {
        std::size_t n = 0;
        for (const auto& c : channels_)
            n += c.points.size();
        return n;
    }

    friend bool operator==(const Trace&, const Trace&) = default;

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    static Level sample_points(const std::vector<Point>& pts, SimTime t)
    {
        auto it = std::upper_bound(pts.begin(), pts.end(), t, [](SimTime v, const Point& p) { return v < p.time; });
        if (it == pts.begin())
            return Level::Unknown;
        return std::prev(it)->level;
    }

    std::size_t find(NetId net) const
    {
        for (std::size_t i = 0; i < channels_.size(); ++i)
            if (channels_[i].net == net)
                return i;
        return npos;
    }

    std::size_t find(std::string_view name) const
    {
        for (std::size_t i = 0; i < channels_.size(); ++i)
            if (channels_[i].name == name)
                return i;
        return npos;
    }

    const Channel& checked(NetId net) const
    {
        auto i = find(net);
        if (i == npos)
            throw std::out_of_range("net #" + std::to_string(net.index) + " is not watched");
        return channels_[i];
    }

    const Channel& checked(std::string_view name) const
    {
        auto i = find(name);
        if (i == npos)
            throw std::out_of_range("net '" + std::string(name) + "' is not watched");
        return channels_[i];
    }

    std::vector<Channel> channels_;
};

} // namespace binclock
