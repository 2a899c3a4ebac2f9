#include "qnls/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "qnls/error.hpp"

namespace qnls::csv {

void Table::add(std::vector<Value> row)
{
    require(row.size() == header.size(), "csv: row has " + std::to_string(row.size()) + " fields, header has " +
                                              std::to_string(header.size()));
    rows.push_back(std::move(row));
}

std::string format(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string format(const Value& v)
{
    if (auto d = std::get_if<double>(&v)) return format(*d);
    if (auto i = std::get_if<long long>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

namespace {

void put_field(std::string& out, const std::string& f)
{
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out += f;
        return;
    }
    out += '"';
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

}  // namespace

std::string render(const Table& t)
{
    std::string out;
    auto put_row = [&](const auto& row, auto&& str) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            put_field(out, str(row[i]));
        }
        out += "\r\n";
    };
    put_row(t.header, [](const std::string& s) { return s; });
    for (const auto& row : t.rows) put_row(row, [](const Value& v) { return format(v); });
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot rename into " + path.string());
    }
}

void write_table(const std::filesystem::path& path, const Table& t) { write_atomic(path, render(t)); }

}  // namespace qnls::csv
