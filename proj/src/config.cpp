#include "qnls/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

namespace qnls {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ConfigEntry> parse_config(const std::string& text, const std::string& source)
{
    std::vector<ConfigEntry> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    auto fail = [&](const std::string& msg) { throw ConfigError(source + ":" + std::to_string(line) + ": " + msg); };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find_first_of("#;");
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail("empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        ConfigEntry e{section, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
        if (e.key.empty()) fail("missing key");
        if (e.value.empty()) fail("missing value for '" + e.key + "'");
        if (!seen.insert({section, e.key}).second) fail("duplicate key '" + e.key + "'");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ConfigEntry> load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

double parse_number(const std::string& s0, const std::string& field)
{
    std::string s = trim(s0);
    double factor = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        factor = std::numbers::pi;
        s = trim(s.substr(0, s.size() - 2));
        if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
        if (s.empty() || s == "+") s = "1";
        if (s == "-") s = "-1";
    }
    double x = 0.0;
    const char* b = s.data();
    if (!s.empty() && *b == '+') ++b;
    auto r = std::from_chars(b, s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(x))
        throw ConfigError(field + ": not a number: '" + s0 + "'");
    return x * factor;
}

long long parse_integer(const std::string& s0, const std::string& field)
{
    const std::string s = trim(s0);
    long long x = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), x);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError(field + ": not an integer: '" + s0 + "'");
    return x;
}

std::vector<double> parse_list(const std::string& s, const std::string& field)
{
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(parse_number(item, field));
    if (out.empty()) throw ConfigError(field + ": empty list");
    return out;
}

}  // namespace qnls
