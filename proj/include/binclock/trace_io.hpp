#pragma once

// CSV form of a trace:
//
//   time_ns,net,level
//   0,s1,0
//   1000000020,s1,1
//
// Rows are ordered by time, then by net name. Levels are 0, 1 or X.

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "binclock/trace.hpp"

namespace binclock {

inline constexpr std::string_view kTraceCsvHeader = "time_ns,net,level";

inline void write_trace_csv(std::ostream& os, const Trace& trace)
{
    struct Row {
        SimTime time;
        const std::string* net;
        Level level;
    };
    std::vector<Row> rows;
    rows.reserve(trace.total_points());
    for (const auto& ch : trace.channels())
        for (const auto& p : ch.points)
            rows.push_back(Row{p.time, &ch.name, p.level});
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return std::tie(a.time, *a.net) < std::tie(b.time, *b.net); });

    std::string out;
    out.reserve(rows.size() * 24 + 32);
    out += kTraceCsvHeader;
    out += '\n';
    char buf[24];
    for (const auto& r : rows) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, r.time.count());
        out.append(buf, p);
        out += ',';
        out += *r.net;
        out += ',';
        out += to_char(r.level);
        out += '\n';
    }
    os << out;
}

/// Rebuilds a trace from CSV. Channels are created in ascending name order
/// and numbered in that order; nets without rows cannot be recovered.
inline Trace read_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != kTraceCsvHeader)
        throw std::runtime_error("trace csv: missing header '" + std::string(kTraceCsvHeader) + "'");

    struct Row {
        SimTime time;
        std::string net;
        Level level;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto fail = [&] { throw std::runtime_error("trace csv: malformed row at line " + std::to_string(line_no)); };
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.size() != c2 + 2 || c2 == c1 + 1)
            fail();
        std::int64_t ns = 0;
        auto [p, ec] = std::from_chars(line.data(), line.data() + c1, ns);
        if (ec != std::errc{} || p != line.data() + c1 || ns < 0)
            fail();
        Level level = Level::Unknown;
        switch (line[c2 + 1]) {
        case '0': level = Level::Low; break;
        case '1': level = Level::High; break;
        case 'X': level = Level::Unknown; break;
        default: fail();
        }
        rows.push_back(Row{SimTime{ns}, line.substr(c1 + 1, c2 - c1 - 1), level});
    }

    std::map<std::string, std::size_t> index;
    for (const auto& r : rows)
        index.emplace(r.net, 0);
    Trace trace;
    std::uint32_t next = 0;
    for (auto& [name, idx] : index)
        idx = trace.add_channel(NetId{next++}, name);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i && rows[i].time < rows[i - 1].time)
            throw std::runtime_error("trace csv: rows are not in time order");
        trace.record(index.at(rows[i].net), rows[i].time, rows[i].level);
    }
    return trace;
}

} // namespace binclock
