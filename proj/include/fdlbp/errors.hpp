#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fdlbp {

/// Broken internal precondition (out-of-range code, non-binary bit, ...).
/// Invalid user input is reported with std::invalid_argument instead.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Problems with external data: files, manifests, stores.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ImageIoError : public DataError {
public:
    using DataError::DataError;
};

class ManifestError : public DataError {
public:
    using DataError::DataError;
};

class NotFoundError : public DataError {
public:
    using DataError::DataError;
};

/// Raised by build_store when one or more images fail; lists every offender.
class BuildError : public DataError {
public:
    BuildError(const std::string& what, std::vector<std::string> offenders)
        : DataError(what), offenders_(std::move(offenders)) {}

    const std::vector<std::string>& offenders() const noexcept { return offenders_; }

private:
    std::vector<std::string> offenders_;
};

enum class StoreErrorKind {
    Io,
    BadMagic,
    UnsupportedVersion,
    FingerprintMismatch,
    DimensionMismatch,
    Truncated,
    Corrupt,
};

const char* to_string(StoreErrorKind kind) noexcept;

class StoreError : public DataError {
public:
    StoreError(StoreErrorKind kind, const std::string& what)
        : DataError(what), kind_(kind) {}

    StoreErrorKind kind() const noexcept { return kind_; }

private:
    StoreErrorKind kind_;
};

}  // namespace fdlbp
