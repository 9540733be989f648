#pragma once

#include <stdexcept>
#include <string>

namespace census {

// Request exceeds a configured table or DP size limit.
class cap_error : public std::runtime_error {
public:
    explicit cap_error(const std::string& what) : std::runtime_error(what) {}
};

// A sampling budget was exhausted or a minimum acceptance rate was violated.
class budget_error : public std::runtime_error {
public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

}
