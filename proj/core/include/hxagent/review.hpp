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

#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "hxagent/experience.hpp"
#include "hxagent/json.hpp"

namespace hxagent {

struct VerdictSubmission {
    std::string episode_id;
    Verdict verdict = Verdict::Correct;
    std::string note;
    std::string submitted_by;
};

// HTTP+JSON service over a campaign output directory:
//   GET  /api/health
//   GET  /api/episodes[?status=pending|judged]
//   GET  /api/episodes/{id}
//   POST /api/episodes/{id}/verdict
//   GET  /api/experience/{task_id}
//   GET  /api/metrics/{task_id}/moving-average[?window=N]
// Only training episodes are listed. A verdict is applied at most once; a
// repeat answers 409 and changes nothing. Verdict commits are serialized.
class ReviewService {
public:
    ReviewService(std::filesystem::path out_dir, RuleProvider provider,
                  std::size_t window = kDefaultAverageWindow);
    ~ReviewService();
    ReviewService(const ReviewService&) = delete;
    ReviewService& operator=(const ReviewService&) = delete;

    // Files under `dir` are served at "/" (the review console build).
    void mount_static(const std::filesystem::path& dir);

    // Binds host:port (0 picks a free port) and serves on a background thread.
    void start(const std::string& host = "127.0.0.1", int port = 0);
    // Serves on the calling thread until stop().
    void listen(const std::string& host, int port);
    void stop();
    int port() const noexcept { return port_; }

    // Direct (non-HTTP) forms of the endpoints, returning {status, body}.
    struct Reply {
        int status = 200;
        Json body;
    };
    Reply list_episodes(const std::optional<std::string>& status) const;
    Reply get_episode(const std::string& episode_id) const;
    Reply submit_verdict(const VerdictSubmission& submission);
    Reply get_experience(const std::string& task_id) const;
    Reply get_moving_average(const std::string& task_id, std::size_t window) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace hxagent
