#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnls {

// Invalid configuration: bad syntax, unknown or repeated key, unparsable value.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    std::string section;  // "" before the first [section]
    std::string key;
    std::string value;
    int line = 0;
};

// "key = value" lines, optional [section] headers, '#' or ';' comments.
// A key repeated inside one section is an error.
std::vector<ConfigEntry> parse_config(const std::string& text, const std::string& source);
std::vector<ConfigEntry> load_config(const std::string& path);

// decimal number, optionally with a "pi" factor: "32pi", "2*pi", "pi", "-0.25"
double parse_number(const std::string& s, const std::string& field);
long long parse_integer(const std::string& s, const std::string& field);
// comma separated numbers
std::vector<double> parse_list(const std::string& s, const std::string& field);

}  // namespace qnls
