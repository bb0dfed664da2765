#include "csi/persist.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "csi/errors.hpp"
#include "csi/serialization.hpp"

namespace csi {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& text, PersistOptions options) {
  const fs::path temp = path.string() + ".partial";
  std::string last_error;
  for (int attempt = 1; attempt <= std::max(1, options.attempts); ++attempt) {
    try {
      {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw PersistError("cannot open " + temp.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) throw PersistError("short write to " + temp.string());
      }
      fs::rename(temp, path);
      return;
    } catch (const std::exception& e) {
      last_error = e.what();
      std::error_code ignored;
      fs::remove(temp, ignored);
      spdlog::warn("write of {} failed (attempt {}): {}", path.string(), attempt, last_error);
      std::this_thread::sleep_for(std::chrono::milliseconds(5 * attempt));
    }
  }
  throw PersistError("giving up on " + path.string() + ": " + last_error);
}

void persist(const Session& session, const fs::path& dir, const DeliberationResult* result,
             PersistOptions options) {
  if (session.phase() != Phase::closed) throw ContractViolation("persist: session is still open");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw PersistError("cannot create " + dir.string() + ": " + ec.message());

  for (std::size_t room = 0; room < session.room_count(); ++room) {
    std::string text;
    for (const auto& m : session.transcript(room)) {
      text += transcript_line(m);
      text += '\n';
    }
    write_file_atomic(dir / ("transcript-" + std::to_string(room) + ".jsonl"), text, options);
  }

  nlohmann::json manifest;
  manifest["config"] = session.config();
  manifest["participants"] = session.participants();
  manifest["plan"] = session.plan();
  manifest["topology"] = session.topology();
  if (result != nullptr)
    manifest["result"] = *result;
  else
    manifest["result"] = nullptr;
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n", options);
}

LoadedSession reload(const fs::path& dir) {
  LoadedSession loaded;
  try {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw PersistError("missing manifest in " + dir.string());
    loaded.manifest = nlohmann::json::parse(in);
    const auto rooms = loaded.manifest.at("plan").at("group_sizes").size();
    loaded.transcripts.resize(rooms);
    for (std::size_t room = 0; room < rooms; ++room) {
      const auto path = dir / ("transcript-" + std::to_string(room) + ".jsonl");
      std::ifstream file(path);
      if (!file) throw PersistError("missing transcript " + path.string());
      std::string line;
      while (std::getline(file, line))
        if (!line.empty()) loaded.transcripts[room].push_back(message_from_record(nlohmann::json::parse(line), room));
    }
  } catch (const nlohmann::json::exception& e) {
    throw PersistError("malformed session files in " + dir.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw PersistError("malformed session files in " + dir.string() + ": " + e.what());
  }
  return loaded;
}

}  // namespace csi
