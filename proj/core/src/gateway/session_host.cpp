#include "csi/gateway/session_host.hpp"

#include <spdlog/spdlog.h>

#include <sstream>

#include "csi/errors.hpp"
#include "csi/gateway/envelope.hpp"
#include "csi/persist.hpp"
#include "csi/serialization.hpp"

namespace csi::gateway {

std::string_view to_string(SessionHost::State state) {
  switch (state) {
    case SessionHost::State::waiting:
      return "waiting";
    case SessionHost::State::running:
      return "running";
    case SessionHost::State::finished:
      return "finished";
  }
  return "unknown";
}

HostConfig host_config_from_json(const nlohmann::json& j) {
  HostConfig c;
  try {
    c.session_id = j.at("session_id").get<std::string>();
    c.expected_participants = j.value("expected_participants", std::size_t{0});
    const auto mode = j.value("mode", std::string("csi"));
    if (mode == "csi")
      c.mode = Mode::csi;
    else if (mode == "survey")
      c.mode = Mode::survey;
    else
      throw ConfigError("unknown session mode: " + mode);
    c.swarm = j.at("config").get<SwarmConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed session config: ") + e.what());
  }
  if (c.session_id.empty()) throw ConfigError("session_id is empty");
  validate(c.swarm);
  return c;
}

SessionHost::SessionHost(HostConfig config, Outbox& outbox)
    : config_(std::move(config)), outbox_(outbox), survey_(config_.swarm.options) {
  validate(config_.swarm);
  validate(config_.binding);
}

SessionHost::State SessionHost::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

void SessionHost::send_locked(ChannelId channel, std::string line) { outbox_.send(channel, std::move(line)); }

void SessionHost::broadcast_locked(const std::string& line) {
  for (const auto& [name, channel] : channel_of_)
    if (channel) send_locked(*channel, line);
}

void SessionHost::fan_out_locked(const Message& m) {
  const auto line = message_envelope(m);
  for (const auto& name : session_->room_members(m.room)) {
    const auto& channel = channel_of_.at(name);
    if (channel) send_locked(*channel, line);
  }
}

bool SessionHost::join(ChannelId channel, const std::string& display_name) {
  std::lock_guard lock(mutex_);
  if (name_of_.count(channel)) {
    send_locked(channel, error_envelope("already_joined", "this channel already joined"));
    return false;
  }
  if (display_name.empty()) {
    send_locked(channel, error_envelope("bad_envelope", "display_name is empty"));
    return false;
  }
  auto known = channel_of_.find(display_name);
  if (known != channel_of_.end() && known->second) {
    send_locked(channel, error_envelope("duplicate_name", "display name already in use: " + display_name));
    return false;
  }
  if (state_ == State::finished) {
    send_locked(channel, error_envelope("session_closed", "session has ended"));
    return false;
  }

  if (state_ == State::waiting) {
    names_.push_back(display_name);
    channel_of_[display_name] = channel;
    name_of_[channel] = display_name;
    if (config_.expected_participants > 0 && names_.size() >= config_.expected_participants) start_locked();
    return true;
  }

  // Running: only a known participant may come back.
  if (known == channel_of_.end()) {
    send_locked(channel, error_envelope("session_started", "session already started"));
    return false;
  }
  known->second = channel;
  name_of_[channel] = display_name;
  const auto room = *session_->room_of(display_name);
  const auto members = session_->room_members(room);
  send_locked(channel, room_assigned(room, members));
  if (config_.mode == Mode::survey) send_locked(channel, survey_open(config_.swarm.options));
  for (const auto& m : session_->transcript(room)) send_locked(channel, message_envelope(m));
  const auto remaining = config_.swarm.duration - session_->clock();
  send_locked(channel, timer_envelope(static_cast<long>((remaining.count() + 999) / 1000)));
  return true;
}

void SessionHost::start() {
  std::lock_guard lock(mutex_);
  start_locked();
}

void SessionHost::start_locked() {
  if (state_ != State::waiting) throw ContractViolation("session " + id() + " already started");
  if (names_.empty()) throw ContractViolation("session " + id() + " has no participants");
  session_ = std::make_unique<Session>(config_.swarm, names_);
  tracker_ = std::make_unique<SentimentTracker>(config_.swarm.options);
  {
    // Relay state is owned by the clock driver; nobody ticks before running.
    relay_ = std::make_unique<ObserverRelay>(session_->room_count(), config_.binding);
  }
  state_ = State::running;
  for (std::size_t room = 0; room < session_->room_count(); ++room) {
    const auto members = session_->room_members(room);
    const auto line = room_assigned(room, members);
    for (const auto& name : members)
      if (const auto& channel = channel_of_.at(name)) send_locked(*channel, line);
  }
  if (config_.mode == Mode::survey) broadcast_locked(survey_open(config_.swarm.options));
  broadcast_locked(timer_envelope(static_cast<long>(config_.swarm.duration.count() / 1000)));
}

void SessionHost::chat(ChannelId channel, std::string text) {
  std::lock_guard lock(mutex_);
  auto who = name_of_.find(channel);
  if (who == name_of_.end()) return send_locked(channel, error_envelope("not_joined", "join a session first"));
  if (state_ == State::waiting) return send_locked(channel, error_envelope("not_started", "session has not started"));
  if (state_ == State::finished) return send_locked(channel, error_envelope("session_closed", "session has ended"));
  if (config_.mode == Mode::survey)
    return send_locked(channel, error_envelope("chat_disabled", "this session is a survey"));
  const auto room = *session_->room_of(who->second);
  try {
    const auto seq = session_->post_message(room, HumanAuthor{who->second}, std::move(text));
    fan_out_locked(session_->transcript_window(room, seq).front());
  } catch (const SessionClosedError& e) {
    send_locked(channel, error_envelope("session_closed", e.what()));
  } catch (const ValidationError& e) {
    send_locked(channel, error_envelope("invalid_message", e.what()));
  }
}

void SessionHost::survey_response(ChannelId channel, std::uint32_t option_id) {
  std::lock_guard lock(mutex_);
  auto who = name_of_.find(channel);
  if (who == name_of_.end()) return send_locked(channel, error_envelope("not_joined", "join a session first"));
  if (config_.mode != Mode::survey || state_ != State::running)
    return send_locked(channel, error_envelope("survey_not_open", "no survey is open"));
  try {
    survey_.record(who->second, option_id);
  } catch (const ValidationError& e) {
    send_locked(channel, error_envelope("invalid_response", e.what()));
  }
}

void SessionHost::disconnect(ChannelId channel) {
  std::lock_guard lock(mutex_);
  auto who = name_of_.find(channel);
  if (who == name_of_.end()) return;
  const auto name = who->second;
  name_of_.erase(who);
  if (state_ == State::waiting) {
    channel_of_.erase(name);
    std::erase(names_, name);
  } else {
    channel_of_[name].reset();
  }
}

void SessionHost::handle_event(const DueEvent& e) {
  switch (e.kind) {
    case DueEvent::Kind::relay_due: {
      if (e.room != 0 || config_.mode != Mode::csi) return;
      // Distill without holding the session lock; posting is serialized.
      const auto windows = relay_->take_round(*session_);
      const auto pending = relay_->prepare_round(windows, config_.swarm.options);
      std::lock_guard lock(mutex_);
      for (const auto& p : pending) fan_out_locked(relay_->apply(*session_, p));
      return;
    }
    case DueEvent::Kind::snapshot_due: {
      if (config_.mode != Mode::csi) return;
      std::lock_guard lock(mutex_);
      tracker_->on_snapshot_due(*session_, e.t);
      return;
    }
    case DueEvent::Kind::session_end:
      return;
  }
}

void SessionHost::tick(Millis dt) {
  std::lock_guard tick_lock(tick_mutex_);
  if (state() != State::running) return;
  session_->advance_clock(dt, [this](const DueEvent& e) { handle_event(e); });
  if (session_->phase() == Phase::closed) {
    finish();
    return;
  }
  std::lock_guard lock(mutex_);
  const auto remaining = config_.swarm.duration - session_->clock();
  broadcast_locked(timer_envelope(static_cast<long>((remaining.count() + 999) / 1000)));
}

void SessionHost::finish() {
  {
    std::lock_guard lock(mutex_);
    if (config_.mode == Mode::csi && !tracker_->series().empty()) result_ = tracker_->finalize();
    state_ = State::finished;
    broadcast_locked(timer_envelope(0));
    broadcast_locked(session_end());
  }
  if (!config_.storage_dir) return;
  const auto dir = *config_.storage_dir / id();
  try {
    persist(*session_, dir, result_ ? &*result_ : nullptr);
    if (config_.mode == Mode::survey) {
      std::ostringstream out;
      write_survey(out, survey_);
      write_file_atomic(dir / "survey.jsonl", out.str());
    }
  } catch (const std::exception& e) {
    spdlog::error("session {}: could not persist to {}: {}", id(), dir.string(), e.what());
  }
}

nlohmann::json SessionHost::status() const {
  std::lock_guard lock(mutex_);
  nlohmann::json j;
  j["session_id"] = id();
  j["state"] = std::string(to_string(state_));
  j["mode"] = config_.mode == Mode::csi ? "csi" : "survey";
  j["participants"] = names_.size();
  std::size_t connected = 0;
  for (const auto& [name, channel] : channel_of_) connected += channel.has_value();
  j["connected"] = connected;
  j["expected_participants"] = config_.expected_participants;
  if (session_) {
    j["rooms"] = session_->room_count();
    j["clock_s"] = to_seconds(session_->clock());
    j["remaining_s"] = to_seconds(config_.swarm.duration - session_->clock());
  }
  if (tracker_ && !tracker_->series().empty()) {
    j["snapshots"] = tracker_->series().size();
    j["latest_sentiment"] = tracker_->series().back();
    j["current_estimate"] = weighted_estimate(tracker_->series().back(), config_.swarm.options);
  }
  if (result_) j["result"] = *result_;
  if (config_.mode == Mode::survey) j["survey_responses"] = survey_.size();
  return j;
}

nlohmann::json SessionHost::export_json() const {
  std::lock_guard lock(mutex_);
  nlohmann::json j;
  j["session_id"] = id();
  j["state"] = std::string(to_string(state_));
  j["config"] = config_.swarm;
  if (session_) {
    j["participants"] = session_->participants();
    j["plan"] = session_->plan();
    j["topology"] = session_->topology();
    nlohmann::json transcripts = nlohmann::json::array();
    for (std::size_t room = 0; room < session_->room_count(); ++room) {
      nlohmann::json records = nlohmann::json::array();
      for (const auto& m : session_->transcript(room)) records.push_back(transcript_record(m));
      transcripts.push_back(records);
    }
    j["transcripts"] = transcripts;
  }
  if (tracker_) j["series"] = tracker_->series();
  j["result"] = result_ ? nlohmann::json(*result_) : nlohmann::json(nullptr);
  nlohmann::json responses = nlohmann::json::array();
  for (const auto& [participant, option] : survey_.responses())
    responses.push_back({{"participant", participant}, {"option_id", option}});
  j["survey"] = responses;
  return j;
}

}  // namespace csi::gateway
