// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>

#include "smartmeter/ingest/state.hpp"

namespace smartmeter::ingest {

/// Writes the state to `path` atomically (temp file + rename).
void write_snapshot(const std::filesystem::path& path, const ServiceState& state);

/// nullopt when the file is missing or unreadable; a bad snapshot is never
/// fatal because the ledger can always be replayed from genesis.
std::optional<ServiceState> read_snapshot(const std::filesystem::path& path);

} // namespace smartmeter::ingest
