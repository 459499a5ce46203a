#ifndef WDVV_CACHE_STORE_HPP_
#define WDVV_CACHE_STORE_HPP_

// On-disk memo table. Text, one record per line after the header:
//
//   wdvv-enum-cache v1
//   closed;d=3;m=1,1;12/1
//   open;d=7;a=2,2,2,2,2,2,2,2,2,2;b=;k=0;-6672/1
//
// Records are written sorted (closed before open, then by key) so that
// saving an unchanged store reproduces the file byte for byte.

#include "wdvv/core_index.hpp"
#include "wdvv/errors.hpp"
#include "wdvv/memo_store.hpp"
#include "wdvv/rational.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace wdvv {

inline constexpr std::string_view cache_magic = "wdvv-enum-cache";
inline constexpr std::string_view cache_version = "v1";

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(';', start);
        out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos)
            return out;
        start = end + 1;
    }
}

inline std::string_view field_value(std::string_view field, std::string_view name)
{
    if (field.size() <= name.size() || field.substr(0, name.size()) != name || field[name.size()] != '=')
        throw std::invalid_argument("expected field '" + std::string(name) + "='");
    return field.substr(name.size() + 1);
}

inline int parse_int(std::string_view s)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("bad integer '" + std::string(s) + "'");
    return v;
}

inline MultiIndex parse_plain_list(std::string_view s)
{
    if (s.empty())
        return {};
    MultiIndex out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = s.find(',', start);
        out.push_back(parse_int(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
        if (end == std::string_view::npos)
            return out;
        start = end + 1;
    }
}

// num/den in lowest terms with den > 0.
inline Rational parse_stored_value(std::string_view s)
{
    const auto slash = s.find('/');
    if (slash == std::string_view::npos)
        throw std::invalid_argument("value must be numerator/denominator");
    Rational q = parse_rational(s);
    if (to_fraction_string(q) != s)
        throw std::invalid_argument("value not in lowest terms with positive denominator");
    return q;
}

inline std::string record(const ClosedKey& key, const Integer& value)
{
    return "closed;d=" + std::to_string(key.d) + ";m=" + join_multi_index(key.m) + ";" +
           to_fraction_string(Rational(value));
}

inline std::string record(const CanonicalKey& key, const Rational& value)
{
    return "open;d=" + std::to_string(key.d) + ";a=" + join_multi_index(key.alpha) + ";b=" +
           join_multi_index(key.beta) + ";k=" + std::to_string(key.k) + ";" + to_fraction_string(value);
}

}  // namespace detail

/// Adds the records of a cache text to `store`. `path` only labels errors.
inline void load_cache_text(std::istream& in, MemoStore& store, const std::string& path = "<cache>")
{
    std::string line;
    std::size_t number = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!header) {
            const std::string prefix = std::string(cache_magic) + " ";
            if (line.rfind(prefix, 0) != 0)
                throw cache_format_error(path, number, "missing header '" + std::string(cache_magic) + " v1'");
            const std::string version = line.substr(prefix.size());
            if (version != cache_version)
                throw cache_version_error(path + ": cache version " + version + " is not supported (expected " +
                                          std::string(cache_version) + ")");
            header = true;
            continue;
        }
        if (line.empty())
            continue;
        try {
            const auto fields = detail::split_fields(line);
            if (fields[0] == "open") {
                if (fields.size() != 6)
                    throw std::invalid_argument("open record needs 6 fields");
                CanonicalKey key{detail::parse_int(detail::field_value(fields[1], "d")),
                                 detail::parse_plain_list(detail::field_value(fields[2], "a")),
                                 detail::parse_plain_list(detail::field_value(fields[3], "b")),
                                 detail::parse_int(detail::field_value(fields[4], "k"))};
                store.open.assign(canonicalize(key), detail::parse_stored_value(fields[5]));
            } else if (fields[0] == "closed") {
                if (fields.size() != 4)
                    throw std::invalid_argument("closed record needs 4 fields");
                ClosedKey key{detail::parse_int(detail::field_value(fields[1], "d")),
                              detail::parse_plain_list(detail::field_value(fields[2], "m"))};
                const Rational v = detail::parse_stored_value(fields[3]);
                if (!is_integral(v))
                    throw std::invalid_argument("closed value must be an integer");
                store.closed.assign(key.canonical(), v.get_num());
            } else {
                throw std::invalid_argument("unknown record kind '" + std::string(fields[0]) + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw cache_format_error(path, number, e.what());
        }
    }
}

/// Absent or empty file: empty store.
inline MemoStore load_cache(const std::filesystem::path& path)
{
    MemoStore store;
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        return store;
    std::ifstream in(path);
    if (!in)
        throw cache_io_error("cannot read cache " + path.string());
    load_cache_text(in, store, path.string());
    return store;
}

inline std::string cache_text(const MemoStore& store)
{
    auto closed = store.closed.snapshot();
    auto open = store.open.snapshot();
    std::sort(closed.begin(), closed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::sort(open.begin(), open.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out = std::string(cache_magic) + " " + std::string(cache_version) + "\n";
    for (const auto& [k, v] : closed)
        out += detail::record(k, v) + "\n";
    for (const auto& [k, v] : open)
        out += detail::record(k, v) + "\n";
    return out;
}

/// Writes a sibling temporary file and renames it over `path`.
inline void save_cache(const MemoStore& store, const std::filesystem::path& path)
{
    static std::atomic<unsigned> counter{0};
    const std::filesystem::path tmp =
        path.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw cache_io_error("cannot write cache " + tmp.string());
        out << cache_text(store);
        out.flush();
        if (!out)
            throw cache_io_error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw cache_io_error("cannot replace cache " + path.string());
    }
}

}  // namespace wdvv

#endif  // WDVV_CACHE_STORE_HPP_
