#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>
#include <sstream>

#include "binclock/binclock.hpp"

using namespace binclock;

namespace {

constexpr std::array<Level, 3> kLevels{Level::Low, Level::High, Level::Unknown};

// Three-valued OR from the two-valued one: an Unknown operand could be
// either value, so the result is known only if both substitutions agree.
Level or_oracle(const std::vector<Level>& xs)
{
    std::vector<std::size_t> unknown;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] == Level::Unknown)
            unknown.push_back(i);
    std::optional<bool> result;
    for (std::size_t mask = 0; mask < (std::size_t{1} << unknown.size()); ++mask) {
        bool acc = false;
        std::size_t u = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] == Level::Unknown)
                acc |= ((mask >> u++) & 1u) != 0;
            else
                acc |= xs[i] == Level::High;
        }
        if (result && *result != acc)
            return Level::Unknown;
        result = acc;
    }
    return level_of(*result);
}

} // namespace

TEST(Level, EdgeOfExhaustive)
{
    for (Level p : kLevels)
        for (Level q : kLevels) {
            const Edge e = edge_of(p, q);
            EXPECT_EQ(e == Edge::Falling, p == Level::High && q == Level::Low);
            EXPECT_EQ(e == Edge::Rising, p == Level::Low && q == Level::High);
            if (p == q || p == Level::Unknown || q == Level::Unknown) {
                EXPECT_EQ(e, Edge::None);
            }
        }
    EXPECT_EQ(edge_of(Level::High, Level::Low), Edge::Falling);
    EXPECT_EQ(edge_of(Level::Low, Level::Low), Edge::None);
    EXPECT_EQ(edge_of(Level::Unknown, Level::High), Edge::None);
}

TEST(Level, CharsAndNames)
{
    EXPECT_EQ(to_char(Level::Low), '0');
    EXPECT_EQ(to_char(Level::High), '1');
    EXPECT_EQ(to_char(Level::Unknown), 'X');
    EXPECT_EQ(to_string(Level::High), "high");
    EXPECT_EQ(to_string(Edge::Falling), "falling");
    EXPECT_EQ(level_of(true), Level::High);
    EXPECT_FALSE(is_known(Level::Unknown));
}

TEST(WiredOr, Examples)
{
    const std::array a{Level::High, Level::Low};
    const std::array b{Level::Low, Level::Low};
    const std::array c{Level::Unknown, Level::Low};
    EXPECT_EQ(resolve_wired_or(a), Level::High);
    EXPECT_EQ(resolve_wired_or(b), Level::Low);
    EXPECT_EQ(resolve_wired_or(c), Level::Unknown);
    EXPECT_THROW(resolve_wired_or(std::span<const Level>{}), std::invalid_argument);
}

TEST(WiredOr, MatchesEnumerationOracleUpToFourDrivers)
{
    for (std::size_t n = 1; n <= 4; ++n) {
        std::size_t combos = 1;
        for (std::size_t i = 0; i < n; ++i)
            combos *= 3;
        for (std::size_t code = 0; code < combos; ++code) {
            std::vector<Level> xs;
            for (std::size_t i = 0, c = code; i < n; ++i, c /= 3)
                xs.push_back(kLevels[c % 3]);
            EXPECT_EQ(resolve_wired_or(xs), or_oracle(xs));
        }
    }
}

TEST(WiredOr, OrderIndependentAndIdempotent)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Level> xs(1 + rng() % 6);
        for (auto& x : xs)
            x = kLevels[rng() % 3];
        const Level base = resolve_wired_or(xs);
        auto shuffled = xs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(resolve_wired_or(shuffled), base);
        auto doubled = xs;
        doubled.insert(doubled.end(), xs.begin(), xs.end());
        EXPECT_EQ(resolve_wired_or(doubled), base);
    }
}

TEST(Time, ParseDuration)
{
    EXPECT_EQ(parse_duration("10s"), SimTime{10'000'000'000});
    EXPECT_EQ(parse_duration("1.5s"), SimTime{1'500'000'000});
    EXPECT_EQ(parse_duration("250ms"), SimTime{250'000'000});
    EXPECT_EQ(parse_duration("4.7ms"), SimTime{4'700'000});
    EXPECT_EQ(parse_duration("3us"), SimTime{3'000});
    EXPECT_EQ(parse_duration("7ns"), SimTime{7});
    EXPECT_EQ(parse_duration("0s"), SimTime{0});
    EXPECT_EQ(parse_duration("86400s"), kOneDay);
    for (const char* bad : {"", "s", "10", "10 s", "-1s", "1.s", ".5s", "0.5ns", "1.0000000001s", "10h", "1e3s",
                            "99999999999999999999s"})
        EXPECT_FALSE(parse_duration(bad).has_value()) << bad;
}

TEST(Time, FormatDurationRoundTrips)
{
    EXPECT_EQ(format_duration(SimTime{0}), "0ns");
    EXPECT_EQ(format_duration(2s), "2s");
    EXPECT_EQ(format_duration(1500ms), "1500ms");
    EXPECT_EQ(format_duration(SimTime{1'000'000'020}), "1000000020ns");
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const SimTime t{static_cast<std::int64_t>(rng() % 100'000'000'000'000ull)};
        EXPECT_EQ(parse_duration(format_duration(t)), t);
    }
}

TEST(Time, FullDayFitsInSimTime) { EXPECT_EQ(kOneDay.count(), 86'400'000'000'000); }

TEST(Trace, SampleSemantics)
{
    Trace t;
    const auto ch = t.add_channel(NetId{4}, "n");
    t.record(ch, SimTime{0}, Level::Low);
    t.record(ch, SimTime{1'000'000'000}, Level::High);
    EXPECT_EQ(t.sample(NetId{4}, SimTime{500'000'000}), Level::Low);
    EXPECT_EQ(t.sample(NetId{4}, SimTime{1'000'000'000}), Level::High);
    EXPECT_EQ(t.sample("n", SimTime{999'999'999}), Level::Low);

    Trace late;
    late.record(late.add_channel(NetId{0}, "m"), SimTime{10}, Level::High);
    EXPECT_EQ(late.sample("m", SimTime{9}), Level::Unknown);
    EXPECT_THROW((void)late.sample("zzz", SimTime{0}), std::out_of_range);
    EXPECT_THROW((void)late.sample(NetId{9}, SimTime{0}), std::out_of_range);
}

TEST(Trace, RecordKeepsChangePointsStrict)
{
    Trace t;
    const auto ch = t.add_channel(NetId{0}, "n");
    t.record(ch, SimTime{5}, Level::High);
    t.record(ch, SimTime{6}, Level::High); // no change
    t.record(ch, SimTime{7}, Level::Low);
    t.record(ch, SimTime{7}, Level::High); // same instant, back to High
    ASSERT_EQ(t.points("n").size(), 1u);
    EXPECT_EQ(t.points("n")[0], (Trace::Point{SimTime{5}, Level::High}));
    t.record(ch, SimTime{9}, Level::Low);
    t.record(ch, SimTime{9}, Level::Unknown);
    ASSERT_EQ(t.points("n").size(), 2u);
    EXPECT_EQ(t.points("n")[1].level, Level::Unknown);
    EXPECT_THROW(t.record(ch, SimTime{8}, Level::Low), std::logic_error);
    EXPECT_THROW(t.add_channel(NetId{0}, "again"), std::logic_error);
}

TEST(Trace, SampleAgreesWithReplay)
{
    std::mt19937_64 rng(99);
    std::vector<Event> events;
    SimTime now{0};
    for (int i = 0; i < 2000; ++i) {
        now += SimTime{static_cast<std::int64_t>(rng() % 5)};
        events.push_back(Event{now, NetId{0}, kLevels[rng() % 3]});
    }
    Trace t;
    const auto ch = t.add_channel(NetId{0}, "n");
    for (const auto& e : events)
        t.record(ch, e.time, e.level);

    const auto pts = t.points("n");
    for (std::size_t i = 1; i < pts.size(); ++i) {
        EXPECT_LT(pts[i - 1].time, pts[i].time);
        EXPECT_NE(pts[i - 1].level, pts[i].level);
    }
    for (std::int64_t q = 0; q <= now.count() + 1; q += 3) {
        Level replay = Level::Unknown;
        for (const auto& e : events)
            if (e.time.count() <= q)
                replay = e.level;
        EXPECT_EQ(t.sample("n", SimTime{q}), replay) << q;
    }
}

TEST(TraceCsv, OrderedByTimeThenName)
{
    Trace t;
    const auto b = t.add_channel(NetId{0}, "b");
    const auto a = t.add_channel(NetId{1}, "a");
    t.record(b, SimTime{0}, Level::Low);
    t.record(a, SimTime{0}, Level::High);
    t.record(b, SimTime{7}, Level::Unknown);
    std::ostringstream os;
    write_trace_csv(os, t);
    EXPECT_EQ(os.str(), "time_ns,net,level\n0,a,1\n0,b,0\n7,b,X\n");
}

TEST(TraceCsv, ReimportIsLossless)
{
    std::mt19937_64 rng(5);
    Trace t;
    for (std::uint32_t c = 0; c < 5; ++c) {
        const auto ch = t.add_channel(NetId{c}, "net" + std::to_string(4 - c));
        SimTime now{0};
        for (int i = 0; i < 200; ++i) {
            now += SimTime{static_cast<std::int64_t>(1 + rng() % 100)};
            t.record(ch, now, kLevels[rng() % 3]);
        }
    }
    std::ostringstream first;
    write_trace_csv(first, t);
    std::istringstream in(first.str());
    const Trace back = read_trace_csv(in);
    std::ostringstream second;
    write_trace_csv(second, back);
    EXPECT_EQ(first.str(), second.str());
    for (const auto& ch : t.channels())
        EXPECT_TRUE(std::ranges::equal(back.points(ch.name), ch.points)) << ch.name;
}

TEST(TraceCsv, RejectsMalformedInput)
{
    for (const char* bad : {"", "time,net,level\n", "time_ns,net,level\nx,a,1\n", "time_ns,net,level\n1,a,2\n",
                            "time_ns,net,level\n1,,1\n", "time_ns,net,level\n5,a,1\n3,a,0\n",
                            "time_ns,net,level\n1,a,10\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(read_trace_csv(in), std::runtime_error) << bad;
    }
}
