#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdt {

// Parse failure with position information (1-based line, 1-based column).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, std::size_t line, std::size_t col)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + msg),
          line_(line),
          col_(col) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return col_; }

private:
    std::size_t line_;
    std::size_t col_;
};

// Malformed query filter or attribute request; distinct from end-of-trace.
class QueryError : public std::runtime_error {
public:
    explicit QueryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested attribute is not present on the cursor event's port.
class AttributeError : public std::runtime_error {
public:
    explicit AttributeError(const std::string& attr)
        : std::runtime_error("attribute not present for this port: " + attr),
          attr_(attr) {}

    const std::string& attribute() const { return attr_; }

private:
    std::string attr_;
};

// Sink failure while emitting; aborts the traced run.
class TraceError : public std::runtime_error {
public:
    explicit TraceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Registry lookup of an entity that is not live.
class NotFoundError : public std::runtime_error {
public:
    explicit NotFoundError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fdt
