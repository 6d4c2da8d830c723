#pragma once

#include <cstdio>

#include <stdexcept>
#include <string>

namespace duality {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical routine cannot reach its requested accuracy.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved, double target)
        : std::runtime_error(what + " (achieved " + short_num(achieved) + ", target " + short_num(target) + ")"),
          achieved_(achieved), target_(target) {}
    double achieved() const noexcept { return achieved_; }
    double target() const noexcept { return target_; }

private:
    static std::string short_num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }
    double achieved_;
    double target_;
};

class KernelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateDensityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CaseDefinitionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace duality
