#pragma once

// Mention counting shared by the observer distiller and the sentiment
// scorer. Both must agree on what counts as support for an option, so the
// rules live here and nowhere else.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csi/config.hpp"
#include "csi/session.hpp"

namespace csi {

/// Cue word lists. Each cue is one or more lowercase tokens.
struct Lexicon {
  std::string version;
  std::vector<std::vector<std::string>> negation_cues;
  std::vector<std::vector<std::string>> causal_cues;

  /// The built-in English lists (matches data/lexicon-v1.json).
  static const Lexicon& english_v1();

  /// Loads {"version", "negation": [...], "causal": [...]} from JSON.
  static Lexicon load(const std::filesystem::path& path);
  static Lexicon parse(std::string_view json_text);
};

struct Token {
  std::string text;  // lowercased; digit group separators removed
  std::size_t begin = 0;
  std::size_t end = 0;  // byte offsets into the source string
};

/// Splits text into sentences on . ! ? ; and newlines. A '.' or ','
/// between two digits stays inside the number.
std::vector<std::string_view> split_sentences(std::string_view text);

/// Word tokens: runs of letters, digits, apostrophes and non-ASCII bytes.
std::vector<Token> tokenize(std::string_view sentence);

/// Canonical token for an option value: "720", "12.5".
std::string value_token(double value);

struct RationaleCandidate {
  std::uint32_t option = 0;
  std::string text;
  std::uint64_t seq = 0;
};

/// Net support per option plus every rationale seen in a supporting sentence.
struct MentionTally {
  std::vector<long> net;          // indexed by option id
  std::vector<long> positive;     // non-negated mentions only
  std::vector<RationaleCandidate> rationales;

  /// max(0, net) as doubles.
  std::vector<double> clipped() const;
  bool any_positive() const;
};

/// Applies the counting rules to one message's text.
///
/// A mention is the option label or value as a standalone token sequence.
/// It counts +1, or -1 when a negation cue ends earlier in the same
/// sentence. Text after the first causal cue of a sentence with a positive
/// mention becomes a rationale for each positively mentioned option.
void tally_text(std::string_view text, std::uint64_t seq, std::span<const AnswerOption> options,
                const Lexicon& lexicon, MentionTally& into);

/// Tallies every message in `messages` regardless of author.
MentionTally tally_messages(std::span<const Message> messages,
                            std::span<const AnswerOption> options,
                            const Lexicon& lexicon = Lexicon::english_v1());

/// Human messages only.
MentionTally tally_human(std::span<const Message> messages, std::span<const AnswerOption> options,
                         const Lexicon& lexicon = Lexicon::english_v1());

/// Human messages when the window has any; observer messages otherwise.
MentionTally tally_echo_damped(std::span<const Message> messages,
                               std::span<const AnswerOption> options,
                               const Lexicon& lexicon = Lexicon::english_v1());

}  // namespace csi
