#include <gtest/gtest.h>

#include "csi/counting.hpp"
#include "csi/errors.hpp"
#include "fixtures.hpp"

using csi::Message;
using csi::test::id_of;
using csi::test::jar_options;

namespace {

csi::MentionTally tally(std::initializer_list<std::string> texts) {
  const auto options = jar_options();
  csi::MentionTally t;
  t.net.assign(options.size(), 0);
  t.positive.assign(options.size(), 0);
  std::uint64_t seq = 0;
  for (const auto& text : texts) csi::tally_text(text, seq++, options, csi::Lexicon::english_v1(), t);
  return t;
}

long net(const csi::MentionTally& t, double value) { return t.net[id_of(jar_options(), value)]; }

Message human(std::uint64_t seq, std::string text) { return {seq, 0, csi::HumanAuthor{"h"}, std::move(text), {}}; }
Message observer(std::uint64_t seq, std::string text) { return {seq, 0, csi::ObserverAuthor{1}, std::move(text), {}}; }

}  // namespace

TEST(Tokenize, LowercasesAndKeepsNumbersWhole) {
  const auto tokens = csi::tokenize("Maybe 1,100 OR 720s, don\xE2\x80\x99t 'know'");
  std::vector<std::string> texts;
  for (const auto& t : tokens) texts.push_back(t.text);
  EXPECT_EQ(texts, (std::vector<std::string>{"maybe", "1100", "or", "720s", "don't", "know"}));
  EXPECT_EQ(tokens[1].begin, 6u);
  EXPECT_EQ(tokens[1].end, 11u);
}

TEST(Tokenize, SentenceSplitting) {
  const auto s = csi::split_sentences("720. Not 5.5 really! Why? a;b\nc");
  std::vector<std::string> got(s.begin(), s.end());
  EXPECT_EQ(got, (std::vector<std::string>{"720", " Not 5.5 really", " Why", " a", "b", "c"}));
}

TEST(Tokenize, ValueTokens) {
  EXPECT_EQ(csi::value_token(720), "720");
  EXPECT_EQ(csi::value_token(12.5), "12.5");
}

TEST(Counting, WorkedDistillExample) {
  const auto t = tally({"I think 720 because the jar is tall", "720 seems right", "maybe 500"});
  EXPECT_EQ(net(t, 720), 2);
  EXPECT_EQ(net(t, 500), 1);
  ASSERT_EQ(t.rationales.size(), 1u);
  EXPECT_EQ(t.rationales[0].option, id_of(jar_options(), 720));
  EXPECT_EQ(t.rationales[0].text, "the jar is tall");
}

TEST(Counting, DoubtCancelsSupport) {
  const auto t = tally({"I doubt 720", "720 because it's huge"});
  EXPECT_EQ(net(t, 720), 0);
  EXPECT_FALSE(t.any_positive() && t.clipped()[id_of(jar_options(), 720)] > 0);
}

TEST(Counting, ScorerExample) {
  const auto t = tally({"720 because tall", "I doubt 720", "500"});
  const auto raw = t.clipped();
  EXPECT_EQ(raw[id_of(jar_options(), 720)], 0.0);
  EXPECT_EQ(raw[id_of(jar_options(), 500)], 1.0);
}

TEST(Counting, NegationOnlyBeforeTheMention) {
  const auto t = tally({"720, not 500"});
  EXPECT_EQ(net(t, 720), 1);
  EXPECT_EQ(net(t, 500), -1);
  EXPECT_EQ(t.clipped()[id_of(jar_options(), 500)], 0.0);
}

TEST(Counting, MultiWordCues) {
  EXPECT_EQ(net(tally({"800 is too high"}), 800), 1);
  EXPECT_EQ(net(tally({"too high for 800"}), 800), -1);
  EXPECT_EQ(net(tally({"too low, 300"}), 300), -1);
  EXPECT_EQ(net(tally({"don\xE2\x80\x99t pick 720"}), 720), -1);
  EXPECT_EQ(net(tally({"No. 720"}), 720), 1);  // cue is in the previous sentence
}

TEST(Counting, StandaloneTokensOnly) {
  const auto t = tally({"7200 or 720s or x720 or 1,100 or 1100."});
  EXPECT_EQ(net(t, 720), 0);
  EXPECT_EQ(net(t, 1100), 2);
}

TEST(Counting, RationaleComesFromSupportingSentencesOnly) {
  EXPECT_TRUE(tally({"not 720 because ugly"}).rationales.empty());
  const auto t = tally({"I doubt 720; 500 since the jar is wide!"});
  EXPECT_EQ(net(t, 720), -1);
  ASSERT_EQ(t.rationales.size(), 1u);
  EXPECT_EQ(t.rationales[0].text, "the jar is wide");
  EXPECT_EQ(t.rationales[0].option, id_of(jar_options(), 500));
}

TEST(Counting, RepeatedMentionsCountEach) {
  EXPECT_EQ(net(tally({"720 720", "720"}), 720), 3);
}

TEST(Counting, HumanOnlyAndEchoDamping) {
  const auto options = jar_options();
  const std::vector<Message> mixed{observer(0, "most support is for 900"), human(1, "500")};
  const auto damped = csi::tally_echo_damped(mixed, options);
  EXPECT_EQ(damped.net[id_of(options, 900)], 0);
  EXPECT_EQ(damped.net[id_of(options, 500)], 1);

  const std::vector<Message> observers_only{observer(0, "most support is for 900")};
  EXPECT_EQ(csi::tally_echo_damped(observers_only, options).net[id_of(options, 900)], 1);
  EXPECT_EQ(csi::tally_human(observers_only, options).net[id_of(options, 900)], 0);
  EXPECT_EQ(csi::tally_messages(mixed, options).net[id_of(options, 900)], 1);
}

TEST(Lexicon, ShippedFileMatchesBuiltIn) {
  const auto loaded = csi::Lexicon::load(std::string(CSI_TEST_DATA_DIR) + "/lexicon-v1.json");
  const auto& builtin = csi::Lexicon::english_v1();
  EXPECT_EQ(loaded.version, "1");
  EXPECT_EQ(loaded.negation_cues, builtin.negation_cues);
  EXPECT_EQ(loaded.causal_cues, builtin.causal_cues);
}

TEST(Lexicon, CustomCuesChangeCounting) {
  const auto lex = csi::Lexicon::parse(R"({"version":"t","negation":["nah"],"causal":["cos"]})");
  const auto options = jar_options();
  csi::MentionTally t;
  t.net.assign(options.size(), 0);
  t.positive.assign(options.size(), 0);
  csi::tally_text("nah 720", 0, options, lex, t);
  csi::tally_text("not 500 cos big", 1, options, lex, t);
  EXPECT_EQ(t.net[id_of(options, 720)], -1);
  EXPECT_EQ(t.net[id_of(options, 500)], 1);
  ASSERT_EQ(t.rationales.size(), 1u);
  EXPECT_EQ(t.rationales[0].text, "big");
  EXPECT_THROW(csi::Lexicon::parse("{"), csi::ConfigError);
}
