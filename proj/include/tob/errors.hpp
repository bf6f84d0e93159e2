#ifndef TOB_ERRORS_HPP
#define TOB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace tob {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

class IncompleteCoverError : public Error {
public:
    IncompleteCoverError(const std::string& what, std::size_t point)
        : Error(what), point_(point) {}
    std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

class SizeCapError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class ConstructionError : public Error {
public:
    using Error::Error;
};

class InvalidExtensionError : public Error {
public:
    using Error::Error;
};

class UnknownElementError : public Error {
public:
    using Error::Error;
};

class CapExceededError : public Error {
public:
    CapExceededError(const std::string& what, std::size_t cap)
        : Error(what), cap_(cap) {}
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Signals a violated internal guarantee, i.e. a bug in a model construction.
class InternalError : public Error {
public:
    using Error::Error;
};

// Raised by the zonotope solver; carries the best per-point distance found
// and the certified error bound reached when the iteration budget ran out.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& what, std::vector<double> best,
                        std::vector<double> bound)
        : Error(what), best_(std::move(best)), bound_(std::move(bound)) {}
    const std::vector<double>& best() const noexcept { return best_; }
    const std::vector<double>& bound() const noexcept { return bound_; }

private:
    std::vector<double> best_;
    std::vector<double> bound_;
};

}  // namespace tob

#endif  // TOB_ERRORS_HPP
