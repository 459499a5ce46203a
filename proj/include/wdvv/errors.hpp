#ifndef WDVV_ERRORS_HPP_
#define WDVV_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wdvv {

/// Broken internal invariant: a recursion cycle, a vanishing left-hand
/// coefficient, a non-integral Welschinger count. Seeing one is a bug.
class consistency_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class recursion_cycle_error : public consistency_error {
public:
    using consistency_error::consistency_error;
};

class zero_coefficient_error : public consistency_error {
public:
    using consistency_error::consistency_error;
};

class no_relation_error : public consistency_error {
public:
    using consistency_error::consistency_error;
};

class integrality_error : public consistency_error {
public:
    using consistency_error::consistency_error;
};

/// Malformed cache file; line() is 1-based.
class cache_format_error : public std::runtime_error {
public:
    cache_format_error(const std::string& path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class cache_version_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class cache_io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wdvv

#endif  // WDVV_ERRORS_HPP_
