#ifndef TFCKA_ERRORS_HPP
#define TFCKA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tfcka {

// Statistics conditioned on an event of probability zero.
class undefined_statistics_error : public std::runtime_error {
public:
    explicit undefined_statistics_error(const std::string& what)
        : std::runtime_error(what) {}
};

// Post-selection on an outcome whose probability underflowed.
class zero_probability_error : public std::runtime_error {
public:
    explicit zero_probability_error(const std::string& what)
        : std::runtime_error(what) {}
};

// The tail-bound equation has no root on the admissible bracket.
class no_root_error : public std::runtime_error {
public:
    explicit no_root_error(const std::string& what)
        : std::runtime_error(what) {}
};

// A finite-key optimization cannot yield a positive key.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what)
        : std::runtime_error(what) {}
};

// Exact simulation requested beyond the state-space guard.
class size_error : public std::runtime_error {
public:
    explicit size_error(const std::string& what)
        : std::runtime_error(what) {}
};

} // namespace tfcka

#endif
