#include "csi/counting.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "csi/errors.hpp"

namespace csi {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || is_digit(static_cast<char>(c)) ||
         c == '\'' || c >= 0x80;
}

// '.' or ',' flanked by digits belongs to a number.
bool is_numeric_separator(std::string_view s, std::size_t i) {
  return (s[i] == '.' || s[i] == ',') && i > 0 && i + 1 < s.size() && is_digit(s[i - 1]) &&
         is_digit(s[i + 1]);
}

std::vector<std::string> cue_tokens(const std::string& cue) {
  std::vector<std::string> out;
  for (auto& t : tokenize(cue)) out.push_back(std::move(t.text));
  return out;
}

std::vector<std::vector<std::string>> cue_list(const nlohmann::json& j, const char* key) {
  std::vector<std::vector<std::string>> out;
  for (const auto& cue : j.at(key)) {
    auto tokens = cue_tokens(cue.get<std::string>());
    if (tokens.empty()) throw ConfigError(std::string("empty cue in lexicon list ") + key);
    out.push_back(std::move(tokens));
  }
  return out;
}

bool matches_at(const std::vector<Token>& tokens, std::size_t i,
                const std::vector<std::string>& pattern) {
  if (pattern.empty() || i + pattern.size() > tokens.size()) return false;
  for (std::size_t k = 0; k < pattern.size(); ++k)
    if (tokens[i + k].text != pattern[k]) return false;
  return true;
}

std::string_view trim_rationale(std::string_view s) {
  constexpr std::string_view junk = " \t\r\n,.!?;:-";
  const auto b = s.find_first_not_of(junk);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(junk);
  return s.substr(b, e - b + 1);
}

struct OptionPatterns {
  std::vector<std::string> label;
  std::vector<std::string> value;
};

std::vector<OptionPatterns> patterns_for(std::span<const AnswerOption> options) {
  std::vector<OptionPatterns> out;
  out.reserve(options.size());
  for (const auto& o : options) {
    OptionPatterns p;
    for (auto& t : tokenize(o.label)) p.label.push_back(std::move(t.text));
    for (auto& t : tokenize(value_token(o.value))) p.value.push_back(std::move(t.text));
    out.push_back(std::move(p));
  }
  return out;
}

void tally_sentence(std::string_view sentence, std::uint64_t seq,
                    std::span<const AnswerOption> options, const std::vector<OptionPatterns>& patterns,
                    const Lexicon& lexicon, MentionTally& into) {
  const auto tokens = tokenize(sentence);
  if (tokens.empty()) return;

  // Earliest token index at which some negation cue has ended.
  std::size_t first_negation_end = tokens.size() + 1;
  for (std::size_t i = 0; i < tokens.size() && first_negation_end > tokens.size(); ++i)
    for (const auto& cue : lexicon.negation_cues)
      if (matches_at(tokens, i, cue)) {
        first_negation_end = i + cue.size();
        break;
      }

  std::vector<std::uint32_t> supported;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (std::size_t o = 0; o < options.size(); ++o) {
      if (!matches_at(tokens, i, patterns[o].label) && !matches_at(tokens, i, patterns[o].value))
        continue;
      if (first_negation_end <= i) {
        into.net[o] -= 1;
      } else {
        into.net[o] += 1;
        into.positive[o] += 1;
        if (std::find(supported.begin(), supported.end(), o) == supported.end())
          supported.push_back(static_cast<std::uint32_t>(o));
      }
    }
  }
  if (supported.empty()) return;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto& cue : lexicon.causal_cues) {
      if (!matches_at(tokens, i, cue)) continue;
      const auto after = tokens[i + cue.size() - 1].end;
      const auto text = trim_rationale(sentence.substr(after));
      if (!text.empty())
        for (auto o : supported) into.rationales.push_back({o, std::string(text), seq});
      return;
    }
  }
}

}  // namespace

const Lexicon& Lexicon::english_v1() {
  static const Lexicon lexicon = [] {
    Lexicon l;
    l.version = "1";
    for (const char* cue : {"not", "no", "don't", "doubt", "too high", "too low"})
      l.negation_cues.push_back(cue_tokens(cue));
    for (const char* cue : {"because", "since", "as"}) l.causal_cues.push_back(cue_tokens(cue));
    return l;
  }();
  return lexicon;
}

Lexicon Lexicon::parse(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    Lexicon l;
    l.version = j.at("version").get<std::string>();
    l.negation_cues = cue_list(j, "negation");
    l.causal_cues = cue_list(j, "causal");
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed lexicon: ") + e.what());
  }
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool boundary = c == '!' || c == '?' || c == ';' || c == '\n' ||
                          (c == '.' && !is_numeric_separator(text, i));
    if (boundary) {
      if (i > start) out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) out.push_back(text.substr(start));
  return out;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    Token tok;
    tok.begin = i;
    while (i < s.size() &&
           (is_word_byte(static_cast<unsigned char>(s[i])) || is_numeric_separator(s, i))) {
      // U+2019 right single quotation mark reads as an apostrophe.
      if (s.compare(i, 3, "\xE2\x80\x99") == 0) {
        tok.text += '\'';
        i += 3;
        continue;
      }
      const char c = s[i];
      if (c == ',') {
        // Digit group separator: 1,200 -> 1200.
      } else if (c >= 'A' && c <= 'Z') {
        tok.text += static_cast<char>(c - 'A' + 'a');
      } else {
        tok.text += c;
      }
      ++i;
    }
    tok.end = i;
    const auto b = tok.text.find_first_not_of('\'');
    if (b == std::string::npos) continue;
    tok.text = tok.text.substr(b, tok.text.find_last_not_of('\'') - b + 1);
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::string value_token(double value) {
  if (std::nearbyint(value) == value && std::abs(value) < 1e15)
    return std::to_string(static_cast<long long>(value));
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return {};
  return {buf.data(), ptr};
}

std::vector<double> MentionTally::clipped() const {
  std::vector<double> out(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) out[i] = static_cast<double>(std::max(0L, net[i]));
  return out;
}

bool MentionTally::any_positive() const {
  return std::any_of(net.begin(), net.end(), [](long v) { return v > 0; });
}

void tally_text(std::string_view text, std::uint64_t seq, std::span<const AnswerOption> options,
                const Lexicon& lexicon, MentionTally& into) {
  if (into.net.size() != options.size()) {
    into.net.assign(options.size(), 0);
    into.positive.assign(options.size(), 0);
  }
  const auto patterns = patterns_for(options);
  for (auto sentence : split_sentences(text))
    tally_sentence(sentence, seq, options, patterns, lexicon, into);
}

namespace {

template <typename Keep>
MentionTally tally_if(std::span<const Message> messages, std::span<const AnswerOption> options,
                      const Lexicon& lexicon, Keep keep) {
  MentionTally tally;
  tally.net.assign(options.size(), 0);
  tally.positive.assign(options.size(), 0);
  const auto patterns = patterns_for(options);
  for (const auto& m : messages) {
    if (!keep(m)) continue;
    for (auto sentence : split_sentences(m.text))
      tally_sentence(sentence, m.seq, options, patterns, lexicon, tally);
  }
  return tally;
}

}  // namespace

MentionTally tally_messages(std::span<const Message> messages, std::span<const AnswerOption> options,
                            const Lexicon& lexicon) {
  return tally_if(messages, options, lexicon, [](const Message&) { return true; });
}

MentionTally tally_human(std::span<const Message> messages, std::span<const AnswerOption> options,
                         const Lexicon& lexicon) {
  return tally_if(messages, options, lexicon, [](const Message& m) { return is_human(m.author); });
}

MentionTally tally_echo_damped(std::span<const Message> messages,
                               std::span<const AnswerOption> options, const Lexicon& lexicon) {
  const bool any_human =
      std::any_of(messages.begin(), messages.end(), [](const Message& m) { return is_human(m.author); });
  if (any_human) return tally_human(messages, options, lexicon);
  return tally_messages(messages, options, lexicon);
}

}  // namespace csi
