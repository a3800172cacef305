#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hmarea {

/// Argument outside the closed unit disk, or a pole of a Möbius map.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// h'(z) vanishes, so the dilatation g'/h' is undefined at `where`.
class CriticalPointError : public std::runtime_error {
public:
    CriticalPointError(const std::string& what, std::complex<double> where)
        : std::runtime_error(what), where_(where) {}
    std::complex<double> where() const noexcept { return where_; }

private:
    std::complex<double> where_;
};

/// Quadrature hit its refinement caps without meeting tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double coarse, double fine)
        : std::runtime_error(what), coarse_(coarse), fine_(fine) {}
    double coarse() const noexcept { return coarse_; }
    double fine() const noexcept { return fine_; }

private:
    double coarse_;
    double fine_;
};

/// Malformed construction parameters (bad alpha, empty profile, mask outside the disk ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested work exceeds a configured budget (e.g. sweep lattice size).
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file could not be parsed into a map, region or family.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_point(std::complex<double> z) {
    std::ostringstream os;
    os.precision(17);
    os << '(' << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i)";
    return os.str();
}

}  // namespace detail
}  // namespace hmarea
