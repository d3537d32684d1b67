#pragma once

#include <stdexcept>
#include <string>

namespace kempf {

/// Base class of everything thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad sizes, invalid values).
struct contract_error : error {
    using error::error;
};

/// A point is outside the domain a model accepts.
struct domain_error : error {
    using error::error;
};

/// An experiment was started from a base case that fails its preconditions.
struct precondition_error : error {
    using error::error;
};

/// An input document has an unknown or ill-typed key.
struct schema_error : error {
    schema_error(std::string key, const std::string& what) : error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// Malformed JSON, with 1-based line/column of the offending byte.
struct parse_error : error {
    parse_error(int line, int column, const std::string& what)
        : error(what), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

} // namespace kempf
