#include "valphase/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "valphase/errors.hpp"

namespace valphase {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

uint64_t parse_u64(const std::string& v, int line) {
    try {
        size_t pos = 0;
        uint64_t n = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": expected integer, got '" + v + "'",
                          line);
    }
}

double parse_double(const std::string& v, int line) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": expected number, got '" + v + "'",
                          line);
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": expected boolean, got '" + v + "'",
                      line);
}

std::vector<uint32_t> parse_u32_list(const std::string& v, int line) {
    std::vector<uint32_t> out;
    for (const auto& item : split(v, ','))
        out.push_back(static_cast<uint32_t>(parse_u64(item, line)));
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": list must not be empty", line);
    return out;
}

struct Welford {
    // Plain two-pass-free accumulation: mean = sum/n in insertion order,
    // stddev from the sum of squared deviations recomputed at the end.
    std::vector<double> values;

    void add(double v) { values.push_back(v); }

    MetricStat stat() const {
        MetricStat s;
        if (values.empty()) return s;
        double sum = 0;
        for (double v : values) sum += v;
        s.mean = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
            double sq = 0;
            for (double v : values) sq += (v - s.mean) * (v - s.mean);
            s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
        }
        return s;
    }
};

}  // namespace

const std::vector<std::string>& latency_metric_names() {
    static const std::vector<std::string> names = {
        "vscc_us",REPLACED_BELOW
    };
    return names;
}

}  // namespace valphase
