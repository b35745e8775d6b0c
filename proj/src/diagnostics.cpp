// Copyright 2026 The garmentkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "garmentkit/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace garmentkit {
namespace {

std::mutex g_mutex;

void default_handler(const std::string& message) {
  std::cerr << "garmentkit warning: " << message << "\n";
}

WarningHandler& handler_slot() {
  static WarningHandler handler = default_handler;
  return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_mutex);
  WarningHandler previous = handler_slot();
  handler_slot() = handler ? std::move(handler) : WarningHandler(default_handler);
  return previous;
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  handler_slot()(message);
}

}  // namespace garmentkit
