// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace smartmeter::cli {

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2 };

/// Bad input from the operator; exits 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The service could not be reached or failed; exits 2.
class ServiceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ServeOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::string> bind;
    std::optional<int> device_port;
    std::optional<int> http_port;
    std::optional<std::filesystem::path> ledger;
    std::optional<std::filesystem::path> snapshot;
};

struct SimulateOptions {
    std::filesystem::path fleet;
    double days = 1.0;
    double accel = 1000.0;
    std::optional<std::filesystem::path> faults;
    std::string server = "127.0.0.1:7070";
    bool offline = false;
};

struct BillOptions {
    std::optional<std::string> units;
    std::optional<std::uint64_t> pulses;
    std::string mode = "prepaid";
    std::optional<std::string> paid;
    std::optional<std::filesystem::path> schedule;
};

/// Shared by report and chart.
struct QueryOptions {
    std::string server = "127.0.0.1:8080";
    std::string device;
    std::optional<std::string> from;
    std::optional<std::string> to;
    std::optional<std::filesystem::path> out;
    std::optional<std::string> token;  // falls back to SMARTMETER_TOKEN
    std::optional<std::string> user;
    std::optional<std::string> password;
};

struct ProvisionOptions {
    std::filesystem::path fleet;
    std::string device;
    std::string ssid;
    std::string credential;
    std::optional<std::filesystem::path> out;  // defaults to rewriting `fleet`
};

int serve(const ServeOptions& opts);
int simulate(const SimulateOptions& opts);
int bill(const BillOptions& opts);
int report(const QueryOptions& opts);
int chart(const QueryOptions& opts);
int provision(const ProvisionOptions& opts);

} // namespace smartmeter::cli
