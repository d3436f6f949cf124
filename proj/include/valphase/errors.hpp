#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace valphase {

// Backend I/O failure (real or injected). Committer decides whether it is
// retryable; everyone else propagates it.
class StorageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Block arrived out of order, or a write batch regresses the savepoint.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownChaincodeError : public std::runtime_error {
public:
    explicit UnknownChaincodeError(const std::string& chaincode_id)
        : std::runtime_error("unknown chaincode: " + chaincode_id), chaincode_id_(chaincode_id) {}
    const std::string& chaincode_id() const { return chaincode_id_; }

private:
    std::string chaincode_id_;
};

// Optimized commit: databases advanced but the ledger append kept failing
// past the retry limit. Repair needs an external block source.
class LedgerBehindError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnrepairableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0) : std::runtime_error(msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace valphase
