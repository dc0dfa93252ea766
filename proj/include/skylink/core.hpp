#ifndef SKYLINK_CORE_HPP
#define SKYLINK_CORE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace skylink {

/// Input outside the mathematical domain of a model formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A required Zernike mode has no usable variance.
class MissingModeError : public DomainError {
public:
    explicit MissingModeError(int mode)
        : DomainError("variance for Zernike mode j=" + std::to_string(mode) + " is missing"),
          mode_(mode) {}
    int mode() const noexcept { return mode_; }

private:
    int mode_;
};

/// Malformed text input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
inline Scalar pi() {
    using std::acos;
    return Scalar(acos(Scalar(-1)));
}

/// 10·log10(ratio). Efficiencies are linear everywhere else.
template <typename Scalar>
inline Scalar to_db(const Scalar& ratio) {
    using std::log10;
    return Scalar(Scalar(10) * log10(ratio));
}

template <typename Scalar>
inline Scalar from_db(const Scalar& db) {
    using std::pow;
    return Scalar(pow(Scalar(10), Scalar(db / Scalar(10))));
}

/// Signed, one decimal: "-2.7 dB".
std::string format_db(double ratio);

namespace detail {

template <typename Scalar>
inline void require_positive(const Scalar& value, const char* name) {
    if (!(value > Scalar(0))) throw DomainError(std::string(name) + " must be > 0");
}

template <typename Scalar>
inline void require_efficiency(const Scalar& value, const char* name) {
    if (!(value > Scalar(0) && value <= Scalar(1)))
        throw DomainError(std::string(name) + " must lie in (0, 1]");
}

}  // namespace detail
}  // namespace skylink

#endif  // SKYLINK_CORE_HPP
