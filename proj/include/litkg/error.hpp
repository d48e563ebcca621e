#pragma once
// Exception types raised by the litkg pipeline.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace litkg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax violation in N-Triples input. `offset` is the 0-based byte offset
/// into the whole stream of the first offending character.
class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line, std::size_t offset, const std::string& what)
        : Error("line " + std::to_string(line) + ", byte " + std::to_string(offset) + ": " + what),
          line_(line), offset_(offset) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

class UnknownTerm : public Error {
public:
    explicit UnknownTerm(std::uint64_t id)
        : Error("unknown term id " + std::to_string(id)) {}
};

class KindConflict : public Error {
public:
    using Error::Error;
};

class SeedNotFound : public Error {
public:
    using Error::Error;
};

class EmptyMatrix : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonPositiveCount : public Error {
public:
    using Error::Error;
};

class DivergenceDetected : public Error {
public:
    DivergenceDetected(int epoch, std::uint32_t focus, std::uint32_t context)
        : Error("non-finite parameter in epoch " + std::to_string(epoch) + " at cell (" +
                std::to_string(focus) + ", " + std::to_string(context) + ")"),
          epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

/// Invalid configuration; maps to exit code 2.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Runtime failure inside a named pipeline stage; maps to exit code 1.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage " + stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace litkg
