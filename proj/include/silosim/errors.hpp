#pragma once

#include <stdexcept>
#include <string>

namespace silosim {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad value, unknown key, malformed file.
struct ConfigError : Error {
    using Error::Error;
};

/// HTTP/transport failure talking to an external service. Retryable by the
/// caller; the sweep harness records it and keeps going.
struct TransportError : Error {
    using Error::Error;
};

} // namespace silosim
