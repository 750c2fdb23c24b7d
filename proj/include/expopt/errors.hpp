#pragma once

#include <stdexcept>
#include <string>

namespace expopt {

/// A precondition on the model inputs is violated (e.g. nu <= 1, K <= 0).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DomainError(msg);
}

}  // namespace expopt
