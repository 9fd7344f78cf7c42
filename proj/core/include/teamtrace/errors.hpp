#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace teamtrace {

// Base for every error the engine raises on bad input.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input (lexicon, config, transcript). Carries a 1-based line.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

// Well-formed input that breaks a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Utterance id not greater than the last processed id.
class StaleUtteranceError : public Error {
public:
    using Error::Error;
};

// Event log that cannot be replayed (gap in seq, unknown kind, ...).
class ReplayError : public Error {
public:
    using Error::Error;
};

// Internal invariant broken; indicates a bug rather than bad input.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace teamtrace
