#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tagcube {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed delimited input. `record()` is the 1-based record number
/// (the header counts as record 1), or 0 when the error is not tied to a row.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t record = 0)
        : Error(message), record_(record) {}

    std::size_t record() const noexcept { return record_; }

private:
    std::size_t record_;
};

/// A schema binding that cannot be honored: unknown or overlapping columns,
/// non-numeric measures.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A query that does not validate against the dataset it targets.
class QueryError : public Error {
public:
    using Error::Error;
};

/// A referenced dataset, permalink or grouping does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

}  // namespace tagcube
