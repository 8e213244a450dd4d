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

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hxagent/sim.hpp"

namespace hxagent {

// In-process W3C WebDriver endpoint backed by the simulator. Navigating to a
// "sim:" entry (or a site file) drives a SimEnvironment; URLs registered with
// add_static_page serve fixed markup. Every request is appended to a
// transcript as "METHOD PATH" followed by the body, if any. Serves one
// session at a time.
class MockWebDriverServer {
public:
    MockWebDriverServer();
    ~MockWebDriverServer();
    MockWebDriverServer(const MockWebDriverServer&) = delete;
    MockWebDriverServer& operator=(const MockWebDriverServer&) = delete;

    void add_static_page(const std::string& url, const std::string& html);

    // Binds to 127.0.0.1 on a free port and serves in the background.
    void start();
    void stop();
    int port() const noexcept { return port_; }
    std::string endpoint() const;

    std::vector<std::string> transcript() const;
    std::string transcript_text() const;
    void clear_transcript();

    static constexpr const char* kSessionId = "mock-session-1";

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace hxagent
