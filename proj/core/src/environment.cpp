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

#include "hxagent/environment.hpp"

namespace hxagent {

std::string_view to_string(ExecStatus status) {
    switch (status) {
        case ExecStatus::Ok: return "ok";
        case ExecStatus::ElementNotFound: return "element-not-found";
        case ExecStatus::NotInteractable: return "not-interactable";
        case ExecStatus::NavigationTimeout: return "navigation-timeout";
    }
    return "ok";
}

}  // namespace hxagent
