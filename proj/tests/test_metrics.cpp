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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "hxagent/error.hpp"
#include "hxagent/metrics.hpp"
#include "support.hpp"

namespace {

using namespace hxagent;

template <typename F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Independent comparator: lower-cased words joined by single spaces.
std::string words(const std::string& s) {
    std::istringstream in(s);
    std::string w, out;
    while (in >> w) {
        for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out += (out.empty() ? "" : " ") + w;
    }
    return out;
}

std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
}

std::string no_root(std::string x) {
    while (!x.empty() && x[0] == '/') x.erase(0, 1);
    return x;
}

bool oracle_equal(const FeasibleAction& p, const ReferenceAction& t) {
    bool op = p.operation == t.operation;
    bool element = t.xpath ? no_root(p.target.xpath) == no_root(*t.xpath)
                           : (t.text ? words(p.target.text) == words(*t.text) : false);
    bool content = true;
    if ((t.operation == Operation::Input || t.operation == Operation::Select) && t.exact_input && t.input) {
        content = p.input_content && trimmed(*p.input_content) == trimmed(*t.input);
    }
    return op && element && content;
}

std::size_t oracle_prefix(const std::vector<FeasibleAction>& p, const std::vector<ReferenceAction>& t) {
    std::size_t n = 0;
    for (; n < t.size(); ++n) {
        if (n >= p.size() || !oracle_equal(p[n], t[n])) break;
    }
    return n;
}

struct Gen {
    std::mt19937 rng;
    explicit Gen(unsigned seed) : rng(seed) {}
    std::size_t below(std::size_t n) { return rng() % n; }

    Operation op() { return std::array{Operation::Click, Operation::Input, Operation::Select}[below(3)]; }
    std::string xpath() { return std::string(below(4) == 0 ? "/" : "") + "html/body/a[" + std::to_string(1 + below(3)) + "]"; }
    std::string text() {
        static const std::array<std::string, 6> pool{"Macie", "macie", " MACIE ", "Next  page", "next page", "Jess"};
        return pool[below(pool.size())];
    }
    std::string content() {
        static const std::array<std::string, 4> pool{"Macie", " Macie\n", "macie", ""};
        return pool[below(pool.size())];
    }
    FeasibleAction predicted() {
        FeasibleAction a;
        a.operation = op();
        a.target.xpath = xpath();
        a.target.text = text();
        if (a.operation != Operation::Click && below(5) != 0) a.input_content = content();
        return a;
    }
    ReferenceAction truth() {
        ReferenceAction r;
        r.operation = op();
        if (below(3) != 0) r.xpath = xpath();
        if (!r.xpath || below(2) == 0) r.text = text();
        if (below(2) == 0) r.input = content();
        r.exact_input = below(4) != 0;
        return r;
    }
    // Truth-derived prediction, mutated with probability 1/4.
    FeasibleAction near(const ReferenceAction& t) {
        FeasibleAction a;
        a.operation = t.operation;
        a.target.xpath = t.xpath.value_or(xpath());
        a.target.text = t.text.value_or(text());
        if (t.input) a.input_content = *t.input;
        else if (t.operation != Operation::Click) a.input_content = content();
        if (below(4) == 0) return predicted();
        return a;
    }
};

FeasibleAction at(const std::string& xpath, const std::string& text) {
    return hxagent::testing::click(xpath, text);
}

ReferenceAction ref_xpath(const std::string& xpath) {
    ReferenceAction r;
    r.xpath = xpath;
    return r;
}

TEST(ActionEqual, IdentityAndSameTextLinks) {
    auto fourth = at("html/body/div[1]/div[2]/div[2]/div[1]/a[1]", "Macie");
    auto eighth = at("html/body/div[1]/div[2]/div[2]/div[2]/a[1]", "Macie");
    EXPECT_TRUE(action_equal(fourth, reference_from(fourth)));
    auto truth = ref_xpath(eighth.target.xpath);
    EXPECT_TRUE(action_equal(eighth, truth));
    EXPECT_FALSE(action_equal(fourth, truth));
    ReferenceAction by_text;
    by_text.text = "  macie ";
    EXPECT_TRUE(action_equal(fourth, by_text));
    EXPECT_TRUE(action_equal(eighth, by_text));
}

TEST(ActionEqual, InputContentFlag) {
    auto typed = hxagent::testing::input("html/body/input[1]", " Macie ");
    ReferenceAction t = reference_from(typed);
    t.input = "Macie";
    EXPECT_TRUE(action_equal(typed, t));
    t.input = "Jess";
    EXPECT_FALSE(action_equal(typed, t));
    t.exact_input = false;
    EXPECT_TRUE(action_equal(typed, t));
    auto as_click = typed;
    as_click.operation = Operation::Click;
    EXPECT_FALSE(action_equal(as_click, t));
}

TEST(ActionEqual, RandomPairsMatchOracle) {
    Gen g(1);
    for (int i = 0; i < 5000; ++i) {
        auto t = g.truth();
        auto p = g.below(2) ? g.near(t) : g.predicted();
        ASSERT_EQ(action_equal(p, t), oracle_equal(p, t)) << to_json(p).dump() << " vs " << to_json(t).dump();
    }
}

TEST(ExactMatch, Values) {
    std::vector<bool> flags(975, false);
    std::fill(flags.begin(), flags.begin() + 946, true);
    double pct = exact_match(flags);
    EXPECT_NEAR(pct, 97.0256, 1e-3);
    EXPECT_EQ(std::lround(pct), 97);
    EXPECT_DOUBLE_EQ(round1(pct), 97.0);
    EXPECT_DOUBLE_EQ(exact_match(std::vector<bool>(12, true)), 100.0);
    EXPECT_EQ(error_code([] { exact_match({}); }), "no-results");
}

TEST(ExactMatch, RandomFlagsMatchCount) {
    Gen g(2);
    for (int i = 0; i < 1000; ++i) {
        std::vector<bool> flags(1 + g.below(60));
        std::size_t ones = 0;
        for (std::size_t k = 0; k < flags.size(); ++k) {
            flags[k] = g.below(2);
            ones += flags[k];
        }
        ASSERT_DOUBLE_EQ(exact_match(flags), 100.0 * ones / flags.size());
    }
}

TEST(PrefixAccuracy, Values) {
    std::vector<FeasibleAction> p{at("a[1]", "1"), at("a[2]", "2"), at("a[3]", "3"), at("a[9]", "x")};
    std::vector<ReferenceAction> t{ref_xpath("a[1]"), ref_xpath("a[2]"), ref_xpath("a[3]"), ref_xpath("a[4]")};
    EXPECT_DOUBLE_EQ(prefix_accuracy(p, t), 0.75);
    p[3] = at("a[4]", "4");
    EXPECT_DOUBLE_EQ(prefix_accuracy(p, t), 1.0);
    EXPECT_TRUE(instance_correct(p, t));
    p.push_back(at("a[5]", "5"));
    EXPECT_DOUBLE_EQ(prefix_accuracy(p, t), 1.0);
    EXPECT_FALSE(instance_correct(p, t));
    EXPECT_DOUBLE_EQ(prefix_accuracy({}, t), 0.0);
    EXPECT_EQ(error_code([&] { prefix_accuracy(p, {}); }), "invalid-ground-truth");
}

TEST(PrefixAccuracy, RandomSequencesMatchScan) {
    Gen g(3);
    for (int i = 0; i < 2000; ++i) {
        std::vector<ReferenceAction> t(1 + g.below(10));
        for (auto& r : t) r = g.truth();
        std::vector<FeasibleAction> p;
        std::size_t len = g.below(12);
        for (std::size_t k = 0; k < len; ++k) p.push_back(k < t.size() ? g.near(t[k]) : g.predicted());
        double got = prefix_accuracy(p, t);
        ASSERT_DOUBLE_EQ(got, static_cast<double>(oracle_prefix(p, t)) / t.size());
        bool correct = instance_correct(p, t);
        ASSERT_EQ(correct, p.size() == t.size() && oracle_prefix(p, t) == t.size());
        if (correct) { ASSERT_DOUBLE_EQ(got, 1.0); }
        // Appending the right next action never lowers the score.
        if (oracle_prefix(p, t) == p.size() && p.size() < t.size()) {
            auto longer = p;
            FeasibleAction exact;
            exact.operation = t[p.size()].operation;
            exact.target.xpath = t[p.size()].xpath.value_or("");
            exact.target.text = t[p.size()].text.value_or("");
            exact.input_content = t[p.size()].input;
            if (oracle_equal(exact, t[p.size()])) {
                longer.push_back(exact);
                ASSERT_GE(prefix_accuracy(longer, t), got);
            }
        }
    }
}

std::vector<StepAccuracy> oracle_steps(const std::vector<ScoredSequence>& seqs) {
    std::vector<StepAccuracy> out;
    for (std::size_t k = 1;; ++k) {
        StepAccuracy s;
        s.step = k;
        for (const auto& q : seqs) {
            if (q.truth.size() < k) continue;
            bool earlier = true;
            for (std::size_t j = 0; j + 1 < k; ++j) earlier = earlier && j < q.predicted.size() && oracle_equal(q.predicted[j], q.truth[j]);
            if (!earlier) continue;
            ++s.reached;
            if (k - 1 < q.predicted.size() && oracle_equal(q.predicted[k - 1], q.truth[k - 1])) ++s.correct;
        }
        if (s.reached == 0) break;
        s.accuracy = static_cast<double>(s.correct) / s.reached;
        out.push_back(s);
    }
    return out;
}

TEST(PerStep, ErrorAtStepThreeOnHalf) {
    std::vector<ScoredSequence> seqs;
    for (int i = 0; i < 10; ++i) {
        ScoredSequence s;
        for (int k = 1; k <= 5; ++k) {
            auto x = "a[" + std::to_string(k) + "]";
            s.truth.push_back(ref_xpath(x));
            s.predicted.push_back(at(k == 3 && i % 2 ? "a[99]" : x, ""));
        }
        seqs.push_back(s);
    }
    auto steps = per_step_accuracy(seqs);
    ASSERT_EQ(steps.size(), 5u);
    EXPECT_DOUBLE_EQ(steps[0].accuracy, 1.0);
    EXPECT_DOUBLE_EQ(steps[1].accuracy, 1.0);
    EXPECT_DOUBLE_EQ(steps[2].accuracy, 0.5);
    EXPECT_EQ(steps[2].reached, 10u);
    EXPECT_EQ(steps[3].reached, 5u);
    EXPECT_DOUBLE_EQ(steps[3].accuracy, 1.0);
    EXPECT_EQ(error_code([] { per_step_accuracy({}); }), "no-results");
}

TEST(PerStep, DeepStepsHaveFewerInstances) {
    std::vector<ScoredSequence> seqs;
    for (std::size_t len = 1; len <= 8; ++len) {
        ScoredSequence s;
        for (std::size_t k = 1; k <= len; ++k) {
            s.truth.push_back(ref_xpath("b[" + std::to_string(k) + "]"));
            s.predicted.push_back(at("b[" + std::to_string(k) + "]", ""));
        }
        seqs.push_back(s);
    }
    auto steps = per_step_accuracy(seqs);
    ASSERT_EQ(steps.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_EQ(steps[k].reached, 8 - k);
        EXPECT_DOUBLE_EQ(steps[k].accuracy, 1.0);
    }
}

TEST(PerStep, RandomSuitesMatchOracle) {
    Gen g(4);
    for (int i = 0; i < 1000; ++i) {
        std::vector<ScoredSequence> seqs(1 + g.below(8));
        for (auto& s : seqs) {
            s.truth.resize(1 + g.below(7));
            for (auto& r : s.truth) r = g.truth();
            std::size_t len = g.below(9);
            for (std::size_t k = 0; k < len; ++k) s.predicted.push_back(k < s.truth.size() ? g.near(s.truth[k]) : g.predicted());
        }
        auto got = per_step_accuracy(seqs);
        auto want = oracle_steps(seqs);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t k = 0; k < got.size(); ++k) {
            ASSERT_EQ(got[k].reached, want[k].reached);
            ASSERT_EQ(got[k].correct, want[k].correct);
            ASSERT_DOUBLE_EQ(got[k].accuracy, want[k].accuracy);
        }
    }
}

TEST(Report, MixedSuiteRecomputed) {
    Gen g(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<InstanceResult> results(1 + g.below(30));
        std::size_t correct = 0;
        double prefix_sum = 0;
        for (std::size_t i = 0; i < results.size(); ++i) {
            auto& r = results[i];
            r.task_id = i % 2 ? "odd" : "even";
            r.instance_id = std::to_string(i);
            r.truth.resize(1 + g.below(5));
            for (auto& t : r.truth) t = g.truth();
            for (std::size_t k = 0; k < r.truth.size() + g.below(2); ++k) {
                r.predicted.push_back(k < r.truth.size() ? g.near(r.truth[k]) : g.predicted());
            }
            auto n = oracle_prefix(r.predicted, r.truth);
            correct += (n == r.truth.size() && r.predicted.size() == r.truth.size());
            prefix_sum += static_cast<double>(n) / r.truth.size();
        }
        TokenLedger ledger;
        ledger.record(Purpose::NextAction, 123, 45);
        auto rep = build_report(results, ledger);
        ASSERT_EQ(rep.correct_instances, correct);
        ASSERT_DOUBLE_EQ(rep.exact_match_pct, std::round(1000.0 * correct / results.size()) / 10.0);
        ASSERT_DOUBLE_EQ(rep.prefix_match_pct, std::round(1000.0 * prefix_sum / results.size()) / 10.0);
        ASSERT_LE(rep.exact_match_pct, rep.prefix_match_pct);
        if (rep.exact_match_pct == 100.0) { ASSERT_EQ(rep.prefix_match_pct, 100.0); }
        bool overrun = std::any_of(results.begin(), results.end(),
                                   [](const InstanceResult& x) { return x.predicted.size() > x.truth.size(); });
        if (!overrun) { ASSERT_EQ(rep.exact_match_pct == 100.0, rep.prefix_match_pct == 100.0); }
        ASSERT_EQ(rep.token_totals, ledger.to_json());
    }
}

// Running past a fully matched truth keeps the full prefix but fails the
// instance, so the two percentages part ways.
TEST(Report, OverrunSplitsTheMetrics) {
    InstanceResult r;
    r.instance_id = "0";
    r.predicted = {at("a[1]", "1"), at("a[2]", "2")};
    r.truth = {ref_xpath("a[1]")};
    auto rep = build_report({r}, {});
    EXPECT_DOUBLE_EQ(rep.prefix_match_pct, 100.0);
    EXPECT_DOUBLE_EQ(rep.exact_match_pct, 0.0);
}

TEST(Report, AllCorrectAndFormats) {
    InstanceResult r;
    r.task_id = "login-form";
    r.instance_id = "0";
    r.episode_id = "login-form-eval-0001";
    r.predicted = {hxagent::testing::input("html/body/input[1]", "test"), at("html/body/button[1]", "Login")};
    for (const auto& a : r.predicted) r.truth.push_back(reference_from(a));
    TokenLedger ledger;
    ledger.record(Purpose::NextAction, 10, 2);
    auto rep = build_report({r}, ledger);
    EXPECT_DOUBLE_EQ(rep.exact_match_pct, 100.0);
    EXPECT_DOUBLE_EQ(rep.prefix_match_pct, 100.0);
    auto j = rep.to_json();
    EXPECT_EQ(j["counts"]["instances"], 1);
    EXPECT_EQ(j["tasks"]["login-form"]["exact_match_pct"], 100.0);
    EXPECT_EQ(j["token_totals"]["total"]["prompt_tokens"], 10);
    EXPECT_NE(rep.summary().find("Exact-Match (%)    100\n"), std::string::npos);
    EXPECT_NE(rep.to_csv().find("login-form,0,login-form-eval-0001,done,1,1.0000,2,2\n"), std::string::npos);
    EXPECT_EQ(error_code([&] { build_report({}, ledger); }), "no-results");
}

TEST(GroundTruthFile, RoundTripAndValidation) {
    GroundTruth t;
    t.task_id = "search-engine";
    GroundTruthInstance inst;
    inst.id = "0";
    inst.task_text = "find Macie";
    ReferenceAction typed;
    typed.operation = Operation::Input;
    typed.xpath = "html/body/input[1]";
    typed.input = "Macie";
    typed.exact_input = false;
    ReferenceAction link;
    link.text = "Macie";
    inst.actions = {typed, link};
    t.instances = {inst};
    auto back = ground_truth_from_json(to_json(t));
    ASSERT_EQ(back.instances.size(), 1u);
    EXPECT_EQ(back.instances[0].actions, inst.actions);
    EXPECT_TRUE(back.find("0"));
    EXPECT_FALSE(back.find("1"));

    auto j = to_json(t);
    j["instances"][0]["actions"] = Json::array();
    EXPECT_EQ(error_code([&] { ground_truth_from_json(j); }), "invalid-ground-truth");
    j = to_json(t);
    j["instances"][0]["actions"][1].erase("text");
    EXPECT_EQ(error_code([&] { ground_truth_from_json(j); }), "invalid-ground-truth");
    j = to_json(t);
    j["instances"][0]["actions"][1]["operation"] = "done";
    EXPECT_EQ(error_code([&] { ground_truth_from_json(j); }), "invalid-ground-truth");
}

}  // namespace
