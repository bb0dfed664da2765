#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "csi/sentiment.hpp"
#include "csi/session.hpp"

namespace csi {

struct PersistOptions {
  int attempts = 3;
};

/// Writes a closed session to `dir`: transcript-<room>.jsonl for every
/// room (empty rooms get an empty file) and manifest.json holding config,
/// plan, topology and, when given, the deliberation result.
///
/// Each file is written to a temporary sibling and renamed into place, so a
/// failed attempt never leaves a partial file behind. Failed writes are
/// retried; the last failure surfaces as PersistError.
///
/// Throws ContractViolation when the session is still open.
void persist(const Session& session, const std::filesystem::path& dir,
             const DeliberationResult* result = nullptr, PersistOptions options = {});

struct LoadedSession {
  nlohmann::json manifest;
  std::vector<std::vector<Message>> transcripts;
};

/// Reads back a persisted session. Throws PersistError on missing or
/// malformed files.
LoadedSession reload(const std::filesystem::path& dir);

/// Writes `text` to `path` atomically (temp file + rename), with retries.
void write_file_atomic(const std::filesystem::path& path, const std::string& text,
                       PersistOptions options = {});

}  // namespace csi
