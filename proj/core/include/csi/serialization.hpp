#pragma once

// JSON mappings for the domain types, and the line-delimited file formats
// built on them.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csi/config.hpp"
#include "csi/sentiment.hpp"
#include "csi/session.hpp"
#include "csi/survey.hpp"
#include "csi/topology.hpp"

namespace csi {

void to_json(nlohmann::json& j, const AnswerOption& o);
void from_json(const nlohmann::json& j, AnswerOption& o);

/// Durations are written in seconds.
void to_json(nlohmann::json& j, const SwarmConfig& c);
void from_json(const nlohmann::json& j, SwarmConfig& c);

void to_json(nlohmann::json& j, const PartitionPlan& p);
void from_json(const nlohmann::json& j, PartitionPlan& p);

void to_json(nlohmann::json& j, const Topology& t);
void from_json(const nlohmann::json& j, Topology& t);

void to_json(nlohmann::json& j, const SentimentSnapshot& s);
void from_json(const nlohmann::json& j, SentimentSnapshot& s);

void to_json(nlohmann::json& j, const DeliberationResult& r);
void from_json(const nlohmann::json& j, DeliberationResult& r);

/// Absent optionals are written as null.
void to_json(nlohmann::json& j, const ErrorReport& r);
void from_json(const nlohmann::json& j, ErrorReport& r);

/// Transcript record: {"seq","t","author_kind","author_id","text"}.
/// author_id is the participant id for humans and the source room index for
/// observers.
nlohmann::json transcript_record(const Message& m);
Message message_from_record(const nlohmann::json& j, std::size_t room);

/// Serializes a transcript record as one line, without the trailing newline.
std::string transcript_line(const Message& m);

/// Options file: one {"id","label","value"} record per line. Blank lines
/// are skipped. Validated with validate_options.
std::vector<AnswerOption> load_options(const std::filesystem::path& path);
std::vector<AnswerOption> parse_options(std::istream& in);
void write_options(std::ostream& out, const std::vector<AnswerOption>& options);

/// Survey file: one {"participant","option_id"} record per line.
SurveyResult load_survey(const std::filesystem::path& path, std::vector<AnswerOption> options);
void write_survey(std::ostream& out, const SurveyResult& survey);

}  // namespace csi
