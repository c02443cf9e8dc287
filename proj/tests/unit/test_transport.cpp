#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rubric_reward/error.hpp"
#include "rubric_reward/transport.hpp"

using namespace rubric_reward;

TEST_CASE("request key depends on system and user text only") {
  GenerationRequest a{"id1", "sys", "user", "schema", {}, {}};
  GenerationRequest b{"id2", "sys", "user", "other", {0.7, 10}, {}};
  GenerationRequest c{"id1", "sy", "suser", "schema", {}, {}};
  CHECK(request_key(a) == request_key(b));
  CHECK(request_key(a) != request_key(c));
  CHECK(request_key(a).size() == 16);
}

TEST_CASE("replay transport serves replies in order and repeats the last") {
  auto path = std::filesystem::temp_directory_path() / "rr_replay_test.jsonl";
  std::filesystem::remove(path);
  GenerationRequest req{"r", "sys", "user", "", {}, {}};
  ReplayTransport::append_record(
      path, req,
      {{std::nullopt, "timeout"}, {GenerationReply{"first", "stop"}, ""},
       {GenerationReply{"second", "length"}, ""}});

  ReplayTransport t = ReplayTransport::from_file(path);
  CHECK_THROWS_AS(t.generate(req), Error);
  CHECK(t.generate(req).text == "first");
  auto r = t.generate(req);
  CHECK(r.text == "second");
  CHECK(r.finish_reason == "length");
  CHECK(t.generate(req).text == "second");

  GenerationRequest other{"o", "sys", "different", "", {}, {}};
  try {
    t.generate(other);
    FAIL("expected TransportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportError);
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed replay files") {
  auto path = std::filesystem::temp_directory_path() / "rr_replay_bad.jsonl";
  std::ofstream(path) << "{\"key\": 1}\n";
  CHECK_THROWS_AS(ReplayTransport::from_file(path), Error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ReplayTransport::from_file(path), Error);
}

TEST_CASE("http transport configuration") {
  CHECK_THROWS_AS(HttpTransport(HttpTransportConfig{"", "", "", 1.0}), Error);
  HttpTransport t(HttpTransportConfig{"http://127.0.0.1:9", "", "m", 0.2});
  try {
    t.generate(GenerationRequest{"req-7", "s", "u", "", {}, {}});
    FAIL("expected TransportError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TransportError);
    CHECK(std::string(e.what()).find("req-7") != std::string::npos);
  }
}

TEST_CASE("replay records keyed by request id") {
  auto path = std::filesystem::temp_directory_path() / "rr_replay_id.jsonl";
  std::ofstream(path) << R"({"request_id": "inst-9", "text": "by id"})" << "\n";
  ReplayTransport t = ReplayTransport::from_file(path);
  CHECK(t.generate(GenerationRequest{"inst-9", "s", "u", "", {}, {}}).text == "by id");
  CHECK_THROWS_AS(t.generate(GenerationRequest{"inst-10", "s", "u", "", {}, {}}), Error);
  std::filesystem::remove(path);
}
