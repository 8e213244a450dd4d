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

#include "hxagent/planner.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include <spdlog/spdlog.h>

#include "hxagent/error.hpp"
#include "hxagent/util.hpp"

namespace hxagent {

namespace {

constexpr std::string_view kHeader =
    "You are a web assistant. You will complete the task by taking a series of steps. Each step is a description of "
    "the action you take and the specific item, entity, or element on the website that the action is applied to.\n";

constexpr std::string_view kResponseFormat =
    "# The format of the JSON response must strictly follow these rules:\n"
    "{\n"
    "  \"chosen_action\": ... (the index of the potential action that you choose)\n"
    "  \"action_description\": ... (a string describing the action you choose)\n"
    "  \"reason\": ... (a string describing the reason why you choose the action)\n"
    "}\n";

std::string preamble(const std::string& memory_section, const std::string& experience_section) {
    std::string out(kHeader);
    out += "\n";
    out += experience_section;
    out += "\n";
    out += "# Here is the actual task.\n";
    out += memory_section;
    out += "\n";
    return out;
}

std::vector<std::string> select_options(const dom::Document& doc, const FeasibleAction& action) {
    std::vector<std::string> out;
    if (action.operation != Operation::Select) return out;
    const auto* node = dom::resolve_xpath(doc, action.target.xpath);
    if (!node) return out;
    for (const auto* el : node->element_children()) {
        if (el->tag() == "option") out.push_back(dom::inner_text(*el));
    }
    return out;
}

}  // namespace

std::string_view to_string(Phase phase) { return phase == Phase::Training ? "training" : "evaluation"; }

Phase parse_phase(std::string_view text) {
    if (text == "training") return Phase::Training;
    if (text == "evaluation") return Phase::Evaluation;
    throw Error("invalid-config", "unknown phase " + std::string(text));
}

void PlannerConfig::validate() const {
    if (step_limit < 1) throw Error("invalid-config", "step_limit must be at least 1");
    if (max_exemplars < 1) throw Error("invalid-config", "max_exemplars must be at least 1");
    if (phase == Phase::Evaluation && !frozen_experience) {
        throw Error("missing-experience", "the evaluation phase needs a frozen experience snapshot");
    }
}

std::string build_main_prompt(const std::string& state, const std::vector<FeasibleAction>& candidates,
                              const std::string& memory_section, const std::string& experience_section) {
    std::string out = preamble(memory_section, experience_section);
    out += "After completing the above steps, you reach a state: " + state +
           " where the following feasible steps exist:\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        out += "POSSIBLE NEXT ACTION #" + std::to_string(i + 1) + ": " + compact(candidates[i]) + "\n";
    }
    out += "POSSIBLE NEXT ACTION #" + std::to_string(candidates.size() + 1) + ": " + std::string(kDoneCandidate) + "\n";
    out += "Your job is to choose the most possible next step to help you complete the task. Choose the DONE action "
           "once the task is complete.\n";
    out += "\n";
    out += kResponseFormat;
    return out;
}

std::string build_duplicate_prompt(const std::vector<FeasibleAction>& duplicates, const FeasibleAction& first_choice,
                                   const std::string& memory_section, const std::string& experience_section) {
    std::string out = preamble(memory_section, experience_section);
    out += "You chose to " + render_action_line(first_choice) +
           ", but the page has several elements that look identical in text. They differ only by their position "
           "(xpath). Use the attached screenshot of the current page to pick the one that fits the task:\n";
    for (std::size_t i = 0; i < duplicates.size(); ++i) {
        out += "DUPLICATE CANDIDATE #" + std::to_string(i + 1) + ": " + compact(duplicates[i]) + "\n";
    }
    out += "\n";
    out += kResponseFormat;
    return out;
}

std::string build_input_prompt(const FeasibleAction& target, const std::vector<std::string>& options,
                               const std::string& memory_section, const std::string& experience_section) {
    std::string out = preamble(memory_section, experience_section);
    out += "The next step is to " + render_action_line(target) + ".\n";
    if (target.operation == Operation::Select) {
        out += "The available options are:\n";
        for (const auto& o : options) out += "- " + o + "\n";
        out += "Reply with only the text of the option to select.\n";
    } else {
        out += "Reply with only the text to type into this field.\n";
    }
    return out;
}

std::string build_summary_prompt() {
    return "The attached screenshot shows a web page that is too large to list in full. Describe the page for a "
           "web assistant: its purpose, the main content, and every element a user can interact with together with "
           "its visible label.\n";
}

Decision choose_next_action(const WebState& state, const std::vector<FeasibleAction>& candidates,
                            const PromptContext& context, LlmGateway& llm, PromptLog* log) {
    CompletionRequest request;
    request.prompt = build_main_prompt(state.body, candidates, context.memory_section, context.experience_section);
    request.purpose = Purpose::NextAction;
    auto parsed = request_decision(llm, request, candidates.size() + 1, log);

    Decision d;
    d.index = parsed.chosen_action;
    d.chosen = static_cast<std::size_t>(parsed.chosen_action) <= candidates.size()
                   ? candidates[parsed.chosen_action - 1]
                   : FeasibleAction::done();
    d.description = std::move(parsed.action_description);
    d.reason = std::move(parsed.reason);
    return d;
}

Decision disambiguate_with_vision(const std::optional<std::string>& screenshot,
                                  const std::vector<FeasibleAction>& duplicates, const Decision& first_choice,
                                  const PromptContext& context, LlmGateway& llm, PromptLog* log) {
    if (duplicates.empty()) throw Error("invalid-argument", "empty duplicate group");
    Decision d = first_choice;
    d.was_disambiguated = true;
    if (!screenshot) {
        spdlog::warn("no screenshot for duplicate group of {}, taking the first element", duplicates.size());
        d.chosen = duplicates.front();
        d.index = 1;
        return d;
    }

    CompletionRequest request;
    request.prompt =
        build_duplicate_prompt(duplicates, first_choice.chosen, context.memory_section, context.experience_section);
    request.images.push_back(Image{*screenshot, "image/png"});
    request.purpose = Purpose::DuplicateDisambiguation;
    auto parsed = request_decision(llm, request, duplicates.size(), log);
    d.chosen = duplicates[parsed.chosen_action - 1];
    d.index = parsed.chosen_action;
    d.reason = first_choice.reason + " / " + parsed.reason;
    return d;
}

std::string generate_input_content(const FeasibleAction& target, const std::vector<std::string>& options,
                                   const PromptContext& context, LlmGateway& llm, PromptLog* log) {
    if (target.operation != Operation::Input && target.operation != Operation::Select) {
        throw Error("invalid-argument", "input content requested for a " + std::string(to_string(target.operation)));
    }
    CompletionRequest request;
    request.prompt = build_input_prompt(target, options, context.memory_section, context.experience_section);
    request.purpose = Purpose::InputContent;
    auto text = util::trim(llm.complete(request, log).text);
    if (text.empty()) throw Error("empty-input-content", render_action_line(target));
    return text;
}

Summarizer llm_summarizer(LlmGateway& llm, PromptLog* log) {
    return [&llm, log](const std::string& screenshot) {
        CompletionRequest request;
        request.prompt = build_summary_prompt();
        request.images.push_back(Image{screenshot, "image/png"});
        request.purpose = Purpose::StateSummary;
        return llm.complete(request, log).text;
    };
}

std::string utc_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

EpisodeTrace run_episode(const std::string& task, const std::string& entry, Environment& env,
                         PlannerServices& services, const PlannerConfig& config, const EpisodeIds& ids) {
    config.validate();
    if (!services.llm) throw Error("llm-unconfigured", "planner services carry no gateway");
    LlmGateway& llm = *services.llm;
    PromptLog* log = services.prompt_log;
    Clock clock = services.clock ? services.clock : Clock(utc_now);
    Summarizer summarizer = services.summarizer ? services.summarizer : llm_summarizer(llm, log);

    ExperienceSnapshot experience;
    if (config.phase == Phase::Evaluation) {
        experience = *config.frozen_experience;
    } else if (services.store) {
        experience = *services.store->current();
    }
    const std::string experience_section = render_experience_section(experience, config.max_exemplars);

    EpisodeTrace trace = new_trace(task, "");
    trace.episode_id = ids.episode_id;
    trace.task_id = ids.task_id;
    trace.entry = entry;
    trace.started_at = clock();

    try {
        auto obs = env.load(entry);
        trace.site_title = obs.title;
        while (true) {
            if (trace.pairs.size() >= config.step_limit) {
                close(trace, Outcome::StepLimit);
                break;
            }
            auto extraction = extract_feasible_actions(obs.document, obs.render_info);
            for (const auto& w : extraction.warnings) spdlog::debug("extractor: {}", w);
            auto state = extract_state(obs.document, obs.render_info, obs.screenshot, summarizer, config.state_budget);

            PromptContext context{render_memory_section(trace, config.memory_window, config.memory_mode),
                                  experience_section};
            auto decision = choose_next_action(state, extraction.actions, context, llm, log);
            if (decision.chosen.is_done()) {
                close(trace, Outcome::Done);
                break;
            }

            for (const auto& group : detect_duplicates(extraction.actions)) {
                auto chosen = static_cast<std::size_t>(decision.index - 1);
                if (std::find(group.begin(), group.end(), chosen) == group.end()) continue;
                std::vector<FeasibleAction> pool;
                for (auto i : group) pool.push_back(extraction.actions[i]);
                decision = disambiguate_with_vision(obs.screenshot, pool, decision, context, llm, log);
                break;
            }

            FeasibleAction action = decision.chosen;
            if (action.operation == Operation::Input || action.operation == Operation::Select) {
                action.input_content =
                    generate_input_content(action, select_options(obs.document, action), context, llm, log);
            }

            auto result = env.execute(action);
            if (!result.ok()) {
                close(trace, Outcome::Error,
                      "execution-failed: " + std::string(to_string(result.status)) + " for " +
                          render_action_line(action) + (result.detail.empty() ? "" : " (" + result.detail + ")"));
                break;
            }
            append(trace, std::move(state), std::move(action), decision.reason);
            obs = std::move(*result.observation);
        }
    } catch (const Error& e) {
        spdlog::warn("episode {} ended with an error: {}", trace.episode_id, e.what());
        close(trace, Outcome::Error, e.what());
    }
    trace.finished_at = clock();

    if (config.phase == Phase::Training && services.store) {
        std::optional<Verdict> verdict = Verdict::Incorrect;
        if (trace.outcome == Outcome::Done) verdict = services.judge ? services.judge(trace, env) : std::nullopt;
        if (verdict) {
            trace.verdict = verdict;
            auto provider = services.rule_provider ? services.rule_provider : llm_rule_provider(llm, log);
            try {
                services.store->commit(trace, provider);
            } catch (const Error& e) {
                spdlog::error("experience update for {} failed: {}", trace.episode_id, e.what());
                trace.error += (trace.error.empty() ? "" : "; ") + std::string("experience-update-failed: ") + e.what();
            }
        }
    }
    return trace;
}

}  // namespace hxagent
