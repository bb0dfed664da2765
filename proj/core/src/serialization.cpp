#include "csi/serialization.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "csi/errors.hpp"

namespace csi {

using nlohmann::json;

void to_json(json& j, const AnswerOption& o) {
  j = json{{"id", o.id}, {"label", o.label}, {"value", o.value}};
}

void from_json(const json& j, AnswerOption& o) {
  j.at("id").get_to(o.id);
  j.at("label").get_to(o.label);
  j.at("value").get_to(o.value);
}

void to_json(json& j, const SwarmConfig& c) {
  j = json{{"min_size", c.min_size},
           {"max_size", c.max_size},
           {"topology", std::string(to_string(c.topology_kind))},
           {"duration_s", to_seconds(c.duration)},
           {"relay_interval_s", to_seconds(c.relay_interval)},
           {"snapshot_interval_s", to_seconds(c.snapshot_interval)},
           {"options", c.options},
           {"seed", c.seed}};
}

void from_json(const json& j, SwarmConfig& c) {
  SwarmConfig d;
  c.min_size = j.value("min_size", d.min_size);
  c.max_size = j.value("max_size", d.max_size);
  c.topology_kind = topology_kind_from_string(j.value("topology", std::string("directed-ring")));
  c.duration = from_seconds(j.value("duration_s", to_seconds(d.duration)));
  c.relay_interval = from_seconds(j.value("relay_interval_s", to_seconds(d.relay_interval)));
  c.snapshot_interval = from_seconds(j.value("snapshot_interval_s", to_seconds(d.snapshot_interval)));
  c.options = j.value("options", std::vector<AnswerOption>{});
  c.seed = j.value("seed", d.seed);
}

void to_json(json& j, const PartitionPlan& p) {
  j = json{{"group_sizes", p.group_sizes}, {"assignments", p.assignments}};
}

void from_json(const json& j, PartitionPlan& p) {
  j.at("group_sizes").get_to(p.group_sizes);
  j.at("assignments").get_to(p.assignments);
}

void to_json(json& j, const Topology& t) {
  json edges = json::array();
  for (const auto& e : t.edges) edges.push_back({e.source, e.target});
  j = json{{"kind", std::string(to_string(t.kind))}, {"room_count", t.room_count}, {"edges", edges}};
}

void from_json(const json& j, Topology& t) {
  t.kind = topology_kind_from_string(j.at("kind").get<std::string>());
  t.room_count = j.at("room_count").get<std::size_t>();
  t.edges.clear();
  for (const auto& e : j.at("edges")) t.edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
}

void to_json(json& j, const SentimentSnapshot& s) {
  j = json{{"t", to_seconds(s.t)}, {"weights", s.weights}};
}

void from_json(const json& j, SentimentSnapshot& s) {
  s.t = from_seconds(j.at("t").get<double>());
  j.at("weights").get_to(s.weights);
}

void to_json(json& j, const DeliberationResult& r) {
  j = json{{"final_estimate", r.final_estimate}, {"winning_option", r.winning_option}, {"series", r.series}};
}

void from_json(const json& j, DeliberationResult& r) {
  j.at("final_estimate").get_to(r.final_estimate);
  j.at("winning_option").get_to(r.winning_option);
  j.at("series").get_to(r.series);
}

namespace {

template <typename J>
void put(J& j, const char* key, const std::optional<double>& v) {
  if (v)
    j[key] = *v;
  else
    j[key] = nullptr;
}

void get(const json& j, const char* key, std::optional<double>& v) {
  if (j.contains(key) && !j[key].is_null())
    v = j[key].get<double>();
  else
    v.reset();
}

}  // namespace

void to_json(json& j, const ErrorReport& r) {
  nlohmann::ordered_json o;
  o["truth"] = r.truth;
  put(o, "mae_individuals", r.mae_individuals);
  put(o, "mae_individuals_pct", r.mae_individuals_pct);
  put(o, "woc_estimate", r.woc_estimate);
  put(o, "woc_abs_error", r.woc_abs_error);
  put(o, "woc_pct", r.woc_pct);
  put(o, "csi_estimate", r.csi_estimate);
  put(o, "csi_abs_error", r.csi_abs_error);
  put(o, "csi_pct", r.csi_pct);
  put(o, "baseline_estimate", r.baseline_estimate);
  put(o, "baseline_abs_error", r.baseline_abs_error);
  put(o, "baseline_pct", r.baseline_pct);
  put(o, "z", r.z);
  put(o, "p_one_tailed", r.p_one_tailed);
  j = json::parse(o.dump());
}

void from_json(const json& j, ErrorReport& r) {
  j.at("truth").get_to(r.truth);
  get(j, "mae_individuals", r.mae_individuals);
  get(j, "mae_individuals_pct", r.mae_individuals_pct);
  get(j, "woc_estimate", r.woc_estimate);
  get(j, "woc_abs_error", r.woc_abs_error);
  get(j, "woc_pct", r.woc_pct);
  get(j, "csi_estimate", r.csi_estimate);
  get(j, "csi_abs_error", r.csi_abs_error);
  get(j, "csi_pct", r.csi_pct);
  get(j, "baseline_estimate", r.baseline_estimate);
  get(j, "baseline_abs_error", r.baseline_abs_error);
  get(j, "baseline_pct", r.baseline_pct);
  get(j, "z", r.z);
  get(j, "p_one_tailed", r.p_one_tailed);
}

namespace {

nlohmann::ordered_json ordered_record(const Message& m) {
  nlohmann::ordered_json o;
  o["seq"] = m.seq;
  o["t"] = to_seconds(m.t);
  if (const auto* h = std::get_if<HumanAuthor>(&m.author)) {
    o["author_kind"] = "human";
    o["author_id"] = h->participant;
  } else {
    o["author_kind"] = "observer";
    o["author_id"] = std::get<ObserverAuthor>(m.author).source_room;
  }
  o["text"] = m.text;
  return o;
}

}  // namespace

json transcript_record(const Message& m) { return json::parse(ordered_record(m).dump()); }

std::string transcript_line(const Message& m) { return ordered_record(m).dump(); }

Message message_from_record(const json& j, std::size_t room) {
  Message m;
  m.seq = j.at("seq").get<std::uint64_t>();
  m.t = from_seconds(j.at("t").get<double>());
  m.room = room;
  const auto kind = j.at("author_kind").get<std::string>();
  if (kind == "human")
    m.author = HumanAuthor{j.at("author_id").get<std::string>()};
  else if (kind == "observer")
    m.author = ObserverAuthor{j.at("author_id").get<std::size_t>()};
  else
    throw ValidationError("unknown author_kind: " + kind);
  m.text = j.at("text").get<std::string>();
  return m;
}

std::vector<AnswerOption> parse_options(std::istream& in) {
  std::vector<AnswerOption> options;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      options.push_back(json::parse(line).get<AnswerOption>());
    } catch (const json::exception& e) {
      throw ConfigError("options line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_options(options);
  return options;
}

std::vector<AnswerOption> load_options(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open options file " + path.string());
  return parse_options(in);
}

void write_options(std::ostream& out, const std::vector<AnswerOption>& options) {
  for (const auto& o : options) {
    nlohmann::ordered_json line;
    line["id"] = o.id;
    line["label"] = o.label;
    line["value"] = o.value;
    out << line.dump() << '\n';
  }
}

SurveyResult load_survey(const std::filesystem::path& path, std::vector<AnswerOption> options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open survey file " + path.string());
  SurveyResult survey(std::move(options));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      survey.record(j.at("participant").get<std::string>(), j.at("option_id").get<std::uint32_t>());
    } catch (const json::exception& e) {
      throw ValidationError("survey line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return survey;
}

void write_survey(std::ostream& out, const SurveyResult& survey) {
  for (const auto& [participant, option] : survey.responses()) {
    nlohmann::ordered_json line;
    line["participant"] = participant;
    line["option_id"] = option;
    out << line.dump() << '\n';
  }
}

}  // namespace csi
