#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace qnls::csv {

// empty string marks a field that is undefined for the row (e.g. E3 at alpha >= 1/2)
using Value = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Value>> rows;

    void add(std::vector<Value> row);
};

// shortest representation that round-trips; "nan", "inf", "-inf" for non-finite values
std::string format(double x);
std::string format(const Value& v);
// quotes fields containing comma, quote, CR or LF; CRLF row terminators
std::string render(const Table& t);

// writes to path.tmp in the same directory and renames over path; errors name the path
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_table(const std::filesystem::path& path, const Table& t);

}  // namespace qnls::csv
