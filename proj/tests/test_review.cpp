// Copyright 2026 The HxAgent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <httplib.h>

#include "hxagent/campaign.hpp"
#include "hxagent/error.hpp"
#include "hxagent/review.hpp"
#include "hxagent/util.hpp"
#include "support.hpp"

namespace {

using namespace hxagent;
using hxagent::testing::TempDir;

CampaignConfig human_config(const TempDir& dir, std::size_t episodes) {
    auto all = builtin_suite(episodes, 1);
    TaskSuite suite;
    for (const auto& t : all.tasks) {
        if (t.task_id == "login-form") suite.tasks.push_back(t);
    }
    util::write_file_atomic(dir / "suite.json", to_json(suite).dump());
    CampaignConfig c;
    c.task_suite = dir / "suite.json";
    c.out_dir = dir / "out";
    c.judge = JudgeMode::Human;
    c.training_episodes = episodes;
    c.retry = {1, std::chrono::milliseconds(0)};
    return c;
}

Json post_verdict(httplib::Client& client, const std::string& id, const std::string& body, int& status) {
    auto res = client.Post("/api/episodes/" + id + "/verdict", body, "application/json");
    status = res ? res->status : -1;
    return res ? Json::parse(res->body) : Json();
}

Json get(httplib::Client& client, const std::string& path, int& status) {
    auto res = client.Get(path);
    status = res ? res->status : -1;
    return res ? Json::parse(res->body) : Json();
}

TEST(Review, HttpVerdictRoundTrip) {
    TempDir dir("review");
    auto c = human_config(dir, 3);
    Campaign campaign(c);
    auto summary = campaign.train();
    auto id = *summary.tasks.at(0).pending_episode;

    ReviewService service(c.out_dir, campaign.rule_provider());
    service.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", service.port());
    int status = 0;

    EXPECT_EQ(get(client, "/api/health", status)["status"], "ok");
    auto pending = get(client, "/api/episodes?status=pending", status);
    ASSERT_EQ(status, 200);
    ASSERT_EQ(pending["episodes"].size(), 1u);
    EXPECT_EQ(pending["episodes"][0]["episode_id"], id);
    auto episode = get(client, "/api/episodes/" + id, status);
    EXPECT_EQ(status, 200);
    EXPECT_EQ(episode["status"], "pending");
    EXPECT_FALSE(episode["pairs"].empty());

    // An incorrect verdict adds one rule and no exemplar.
    auto reply = post_verdict(client, id, R"({"verdict": "incorrect", "note": "n", "submitted_by": "qa"})", status);
    ASSERT_EQ(status, 200) << reply.dump();
    EXPECT_EQ(reply["snapshot"]["rule_count"], 1);
    EXPECT_EQ(reply["snapshot"]["correct_count"], 0);
    EXPECT_EQ(reply["snapshot"]["incorrect_count"], 1);

    // Second submit: 409, nothing changes.
    auto before = get(client, "/api/experience/login-form", status);
    auto again = post_verdict(client, id, R"({"verdict": "correct"})", status);
    EXPECT_EQ(status, 409);
    EXPECT_EQ(again["error"], "conflict");
    EXPECT_EQ(get(client, "/api/experience/login-form", status), before);
    EXPECT_EQ(get(client, "/api/episodes/" + id, status)["verdict"], "incorrect");

    post_verdict(client, "login-form-train-9999", R"({"verdict": "correct"})", status);
    EXPECT_EQ(status, 404);
    get(client, "/api/experience/nope", status);
    EXPECT_EQ(status, 404);
    get(client, "/api/episodes/..%2Fx", status);
    EXPECT_EQ(status, 404);

    // A correct verdict adds one exemplar.
    auto next = *campaign.train().tasks.at(0).pending_episode;
    EXPECT_NE(next, id);
    post_verdict(client, next, "not json", status);
    EXPECT_EQ(status, 400);
    post_verdict(client, next, R"({"verdict": "maybe"})", status);
    EXPECT_EQ(status, 400);
    reply = post_verdict(client, next, R"({"verdict": "correct"})", status);
    ASSERT_EQ(status, 200);
    EXPECT_EQ(reply["snapshot"]["rule_count"], 1);
    EXPECT_EQ(reply["snapshot"]["correct_count"], 1);
    EXPECT_EQ(reply["snapshot"]["exemplar_count"], 1);

    auto judged = get(client, "/api/episodes?status=judged", status);
    EXPECT_EQ(judged["episodes"].size(), 2u);
    get(client, "/api/episodes?status=odd", status);
    EXPECT_EQ(status, 400);
    get(client, "/api/metrics/login-form/moving-average?window=0", status);
    EXPECT_EQ(status, 400);
    auto reviews = util::read_file(c.out_dir / "reports" / "reviews.jsonl");
    EXPECT_EQ(std::count(reviews.begin(), reviews.end(), '\n'), 2);
    service.stop();
}

TEST(Review, TenHumanVerdictsHalfCorrect) {
    TempDir dir("review");
    auto c = human_config(dir, 10);
    Campaign campaign(c);
    ReviewService service(c.out_dir, campaign.rule_provider());
    for (int i = 0; i < 10; ++i) {
        auto pending = campaign.train().tasks.at(0).pending_episode;
        ASSERT_TRUE(pending) << i;
        auto r = service.submit_verdict({*pending, i % 2 == 0 ? Verdict::Correct : Verdict::Incorrect, "", "qa"});
        ASSERT_EQ(r.status, 200) << r.body.dump();
    }
    EXPECT_FALSE(campaign.train().tasks.at(0).pending_episode);
    auto ma = service.get_moving_average("login-form", kDefaultAverageWindow);
    ASSERT_EQ(ma.status, 200);
    ASSERT_EQ(ma.body["points"].size(), 10u);
    EXPECT_DOUBLE_EQ(ma.body["points"].back()["value"].get<double>(), 0.5);
    EXPECT_EQ(ma.body["points"].back()["episode"], 10);
    auto exp = service.get_experience("login-form").body;
    EXPECT_EQ(exp["correct_count"], 5);
    EXPECT_EQ(exp["incorrect_count"], 5);
    EXPECT_EQ(exp["rule_count"], 5);
}

TEST(Review, RejectsZeroWindow) {
    TempDir dir("review");
    EXPECT_THROW(ReviewService(dir.path(), nullptr, 0), Error);
}

}  // namespace
