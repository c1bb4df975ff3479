#pragma once

#include <stdexcept>
#include <string>

namespace cubetutor {

/// Coarse classification used by the HTTP layer to pick a status code.
enum class ErrorKind { InvalidArgument, NotFound, Conflict, Validation, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error invalid_argument(const std::string& what) { return Error(ErrorKind::InvalidArgument, what); }

}  // namespace cubetutor
