#pragma once

#include <stdexcept>
#include <string>

namespace nrmap {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Index or (start, length) pair outside its valid domain.
class range_error : public error {
public:
  using error::error;
};

/// Inconsistent or unsupported configuration.
class config_error : public error {
public:
  using error::error;
};

/// Bit string of the wrong shape for the requested codec.
class format_error : public error {
public:
  using error::error;
};

/// Encoded value outside the image of its encoder.
class decode_error : public error {
public:
  using error::error;
};

/// Fields that cannot be represented in the configured DCI layout.
class encode_error : public error {
public:
  using error::error;
};

/// Operation not permitted for the given inputs (wrong allocation type, locked TDD symbol, ...).
class constraint_error : public error {
public:
  using error::error;
};

/// Grant does not fit the target bandwidth part.
class capacity_error : public error {
public:
  using error::error;
};

/// Target cells already used by another transmission or a protection window.
class conflict_error : public error {
public:
  using error::error;
};

/// Delay exceeds the transmit buffer or the simulation horizon.
class buffer_error : public error {
public:
  using error::error;
};

/// No free contiguous block for a time/frequency reallocation.
class reallocation_failure : public error {
public:
  using error::error;
};

/// Scheduler demand does not fit the bandwidth part.
class grant_error : public error {
public:
  using error::error;
};

/// Bad command-line usage (unknown render format, missing argument).
class usage_error : public error {
public:
  using error::error;
};

/// File could not be read or written.
class io_error : public error {
public:
  using error::error;
};

} // namespace nrmap
