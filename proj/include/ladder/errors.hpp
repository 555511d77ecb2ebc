#pragma once

#include <stdexcept>
#include <string>

namespace ladder {

// Invalid arguments are reported with std::invalid_argument throughout the
// library. The types below cover the remaining failure classes; each maps to
// a distinct CLI exit code (see tools/ladder_cli.cpp).

class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the signal analysis routines when a series does not contain the
// feature being measured (too few periods, no envelope maximum, ...).
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense exact diagonalization is capped at 5 rungs (dimension 1024).
class UnsupportedSize : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, int line, const std::string& what)
        : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

    const std::string& key() const { return key_; }
    // 0 when the value came from a command-line flag.
    int line() const { return line_; }

private:
    static std::string format(const std::string& key, int line, const std::string& what) {
        std::string msg = "configuration error";
        if (!key.empty()) msg += " in key '" + key + "'";
        if (line > 0) msg += " (line " + std::to_string(line) + ")";
        return msg + ": " + what;
    }

    std::string key_;
    int line_;
};

class IoError : public std::runtime_error {
public:
    IoError(std::string path, const std::string& what)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

}  // namespace ladder
