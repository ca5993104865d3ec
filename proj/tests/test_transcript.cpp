#include <doctest.h>

#include <fstream>
#include <sstream>

#include "emoscript/session.hpp"
#include "emoscript/transcript.hpp"
#include "emoscript/unicode.hpp"
#include "support.hpp"

using namespace emoscript;
using namespace std::chrono_literals;

namespace {

std::shared_ptr<Session> run_session(std::vector<std::string> replies, std::size_t steps,
                                     std::uint64_t seed = 42) {
    SessionConfig c;
    c.seed = seed;
    c.retry = RetryPolicy{2, 1ms, 1000ms};
    c.mapping = std::make_shared<MappingConfig>(testing::shipped_mapping());
    c.card = std::make_shared<CharacterCard>(testing::shipped_card());
    auto engine = std::make_shared<Engine>();
    engine->llm = std::make_shared<ScriptedBackend>(std::move(replies));
    engine->classifier = std::make_shared<LexiconClassifier>(testing::shipped_lexicon());
    engine->clock = fixed_clock_now;
    SessionIdGenerator ids(0);
    auto s = create_session(c, engine, ids);
    for (std::size_t i = 0; i < steps; ++i) s->step("Human line " + std::to_string(i + 1));
    return s;
}

const std::vector<std::string> kReplies = {
    "😀 Hi! I'm Haru. What's your name?",
    "😮 Whoa...That's amazing! Tell me more?",
    "I remember all the fun times we shared ☺️",
    "😢 It’s not gonna be the same without you.",
    "You're leaving me behind? 😱",
    "🤮 Ewwww! That sounds gross!",
    "😠 That's not fair!",
    "Sure!\nHuman: I can answer for myself",
    "🦄 Unicorns are not in my routine book.",
    "😍😍😍 So many hearts! 👩‍👩‍👧‍👦",
    "😀 Goodbye, friend! Come back soon!",
};

}  // namespace

TEST_SUITE("transcript") {

TEST_CASE("records round-trip through JSON") {
    auto s = run_session(kReplies, 11);
    auto turns = s->turns();
    turns[3].error_annotation = ErrorAnnotation{HumanErrorType::ASR, LLMErrorType::Hallucination};
    for (const auto& t : turns) {
        const auto line = turn_to_line(t);
        const auto back = turn_from_json(nlohmann::json::parse(line));
        CHECK(turn_to_line(back) == line);
        CHECK(back.script == t.script);
        CHECK(back.guard == t.guard);
    }
}

TEST_CASE("eleven-turn session persists eleven replayable records") {
    auto s = run_session(kReplies, 11);
    REQUIRE(s->state() == SessionState::closed);
    const auto path = testing::temp_path("eleven.jsonl");
    persist_transcript(*s, path);
    const auto turns = read_transcript(path);
    REQUIRE(turns.size() == 11);
    for (std::size_t i = 0; i < turns.size(); ++i) CHECK(turns[i].index == i + 1);
    const auto results =
        replay_transcript(turns, LexiconClassifier(testing::shipped_lexicon()), testing::shipped_mapping(), "Human:");
    for (std::size_t i = 0; i < results.size(); ++i) {
        INFO("turn " << i + 1);
        CHECK(results[i].ok());
        CHECK(script_to_json(results[i].script).dump() == script_to_json(turns[i].script).dump());
    }
    for (const auto& t : turns) {
        for (const auto& el : t.script.elements) {
            if (const auto* sp = std::get_if<SpeechElement>(&el)) CHECK_FALSE(unicode::contains_extended_pictographic(sp->text));
        }
    }
    // The persisted bytes are exactly one line per turn.
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string expected;
    for (const auto& t : s->turns()) expected += turn_to_line(t) + "\n";
    CHECK(buf.str() == expected);
}

TEST_CASE("tampering is detected") {
    auto turns = run_session(kReplies, 3)->turns();
    const LexiconClassifier classifier(testing::shipped_lexicon());
    auto seed_changed = turns;
    seed_changed[1].seed_used ^= 1;
    auto genre_changed = turns;
    std::get<SpeechElement>(genre_changed[0].script.elements[1]).genre = VoiceGenre::cheeky;
    auto flag_changed = turns;
    flag_changed[2].guard.truncated_for_length = true;
    int mismatches = 0;
    for (const auto* variant : {&seed_changed, &genre_changed, &flag_changed}) {
        for (const auto& r : replay_transcript(*variant, classifier, testing::shipped_mapping(), "Human:")) {
            mismatches += r.ok() ? 0 : 1;
        }
    }
    // The seed change only matters when the turn has an emoji with a
    // multi-routine list; turn 2 has 😮 -> {surprise, amazed}.
    CHECK(mismatches >= 2);
    CHECK_FALSE(replay_transcript(genre_changed, classifier, testing::shipped_mapping(), "Human:")[0].ok());
    CHECK_FALSE(replay_transcript(flag_changed, classifier, testing::shipped_mapping(), "Human:")[2].ok());
}

TEST_CASE("fallback turns replay with default genres") {
    Turn t;
    t.session_id = "s";
    t.index = 1;
    t.llm_raw = "😡 That's not fair!";
    t.guard.guarded_text = t.llm_raw;
    t.seed_used = 5;
    t.classifier_fallback = true;
    SeededRng rng(5);
    t.script = annotate_with_default_genres(t.llm_raw, testing::shipped_mapping(), rng).script;
    CHECK(replay_turn(t, {}, LexiconClassifier(testing::shipped_lexicon()), testing::shipped_mapping(), "Human:").ok());
}

TEST_CASE("empty session cannot be persisted") {
    auto s = run_session({}, 0);
    CHECK(testing::error_code_of([&] { persist_transcript(*s, testing::temp_path("empty.jsonl")); }) ==
          ErrorCode::StorageError);
    auto full = run_session({"Hi."}, 1);
    CHECK(testing::error_code_of([&] { persist_transcript(*full, "/nonexistent-dir/x.jsonl"); }) ==
          ErrorCode::StorageError);
}

TEST_CASE("malformed transcripts name the line") {
    const auto good = turn_to_line(run_session({"Hi."}, 1)->turns().front());
    std::istringstream in(good + "\n\n{\"session_id\": 3}\n");
    try {
        read_transcript(in);
        FAIL("accepted a malformed record");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    auto bad_genre = nlohmann::json::parse(good);
    bad_genre["script"][0]["genre"] = "operatic";
    CHECK(testing::error_code_of([&] { turn_from_json(bad_genre); }) == ErrorCode::ParseError);
    auto extra_emotion = nlohmann::json::parse(good);
    extra_emotion["emotions"].push_back({{"label", "joy"}, {"confidence", 0.5}});
    CHECK(testing::error_code_of([&] { turn_from_json(extra_emotion); }) == ErrorCode::ParseError);
}

}  // TEST_SUITE
