#pragma once

#include <stdexcept>
#include <string>

namespace qpass {

/// Failure classes. The CLI maps each one to a stable exit code.
enum class ErrorKind { parse, validation, config, numerical, io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Same error with `context: ` prepended to the message.
    Error with_context(const std::string& context) const { return Error(kind_, context + ": " + what()); }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline Error validation_error(const std::string& what) { return Error(ErrorKind::validation, what); }
inline Error config_error(const std::string& what) { return Error(ErrorKind::config, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::numerical, what); }
inline Error io_error(const std::string& what) { return Error(ErrorKind::io, what); }

}  // namespace qpass
