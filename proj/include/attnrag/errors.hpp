#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace attnrag {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller handed us something unusable (empty query, ratio < 1, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Bad configuration value (chunk_size = 0, top_k = 0, unknown provider, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The assistant model ignored the prefix format (reply too long).
class MalformedPrefixError : public Error {
public:
    using Error::Error;
};

/// Chunk text re-tokenized to a different span inside the assembled prompt.
class SpanAlignmentError : public Error {
public:
    using Error::Error;
};

/// Prompt exceeds the provider's context window.
class OversizeChunkError : public Error {
public:
    using Error::Error;
};

/// Attention provider failed; carries the chunk index when known.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& msg,
                           std::optional<std::size_t> chunk = std::nullopt)
        : Error(chunk ? msg + " (chunk " + std::to_string(*chunk) + ")" : msg),
          chunk_index(chunk) {}

    std::optional<std::size_t> chunk_index;
};

/// Index out of range (layer range or context range vs. trace shape).
class IndexError : public Error {
public:
    using Error::Error;
};

/// Invariant violation that indicates a bug, not bad input.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace attnrag
