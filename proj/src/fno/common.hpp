#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fno {

/// Error taxonomy shared by the C++ core, the C API and the CLI exit codes:
/// usage = 1, data = 2, numeric = 3.
class Error : public std::runtime_error {
public:
    enum class Kind { usage = 1, data = 2, numeric = 3 };

    Error(Kind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(std::string msg) : Error(Kind::usage, std::move(msg)) {}
};

class DataError : public Error {
public:
    explicit DataError(std::string msg) : Error(Kind::data, std::move(msg)) {}
};

class NumericError : public Error {
public:
    explicit NumericError(std::string msg) : Error(Kind::numeric, std::move(msg)) {}
};

namespace detail {
inline void concat_into(std::ostringstream&) {}
template <typename T, typename... Rest>
void concat_into(std::ostringstream& os, T&& v, Rest&&... rest) {
    os << std::forward<T>(v);
    concat_into(os, std::forward<Rest>(rest)...);
}
} // namespace detail

template <typename... Parts>
std::string concat(Parts&&... parts) {
    std::ostringstream os;
    detail::concat_into(os, std::forward<Parts>(parts)...);
    return os.str();
}

#define FNO_REQUIRE(cond, ErrorType, ...)                                \
    do {                                                                 \
        if (!(cond)) throw ErrorType(::fno::concat(__VA_ARGS__));        \
    } while (0)

} // namespace fno
