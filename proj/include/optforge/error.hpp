#pragma once

#include <stdexcept>

namespace optforge {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace optforge
