#pragma once

#include "optforge/error.hpp"

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

namespace optforge {

class ProcessError : public Error {
public:
    using Error::Error;
};

struct ProcessResult {
    /// Exit status, or 128 + signal number when the child was killed.
    int exit_code = 0;
    std::string out;
    std::string err;
    bool timed_out = false;
};

/// Runs argv[0] (resolved through PATH) with `input` on stdin and collects
/// stdout and stderr. A zero timeout waits indefinitely. Throws ProcessError
/// when the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds{0});

} // namespace optforge
