#ifndef RECODYN_ERRORS_HPP
#define RECODYN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace recodyn {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace recodyn

#endif
